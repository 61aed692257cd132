#pragma once

// Brute-force minimization of tau*psi(u) + (u - x)^2 / 2 over [-|x|, |x|]:
// a symmetric grid, then golden-section refinement inside the bracket of
// every grid local minimum.

#include <algorithm>
#include <cmath>
#include <vector>

#include "pnppbcd/prox.hpp"

namespace testing_helpers {

inline double prox_objective(const pnppbcd::SparsityPenalty& psi, double tau, double x, double u) {
  return tau * pnppbcd::psi_eval(psi, u) + 0.5 * (u - x) * (u - x);
}

struct OracleResult {
  double u;
  double value;
};

inline OracleResult prox_oracle(const pnppbcd::SparsityPenalty& psi, double tau, double x, int half_points) {
  const double ax = std::abs(x);
  auto f = [&](double u) { return prox_objective(psi, tau, x, u); };
  OracleResult best{0.0, f(0.0)};
  if (ax == 0.0) return best;
  const int n = 2 * half_points + 1;
  std::vector<double> grid(n);
  std::vector<double> val(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = i == half_points ? 0.0 : ax * (i - half_points) / half_points;
    val[i] = f(grid[i]);
  }
  auto consider = [&](double u) {
    const double v = f(u);
    if (v < best.value) best = {u, v};
  };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < n; ++i) {
    consider(grid[i]);
    const bool left_ok = i == 0 || val[i] <= val[i - 1];
    const bool right_ok = i == n - 1 || val[i] <= val[i + 1];
    if (!(left_ok && right_ok)) continue;
    double lo = grid[std::max(i - 1, 0)];
    double hi = grid[std::min(i + 1, n - 1)];
    double c = hi - phi * (hi - lo);
    double d = lo + phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, ax); ++it) {
      if (fc <= fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - phi * (hi - lo);
        fc = f(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + phi * (hi - lo);
        fd = f(d);
      }
      consider(c);
      consider(d);
    }
  }
  return best;
}

}  // namespace testing_helpers
