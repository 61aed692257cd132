#include "pnppbcd/prox.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>

namespace pnppbcd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Among candidate magnitudes in [0, ax], the one with the smallest prox
// objective; candidates are visited in increasing order and only a strict
// improvement replaces the incumbent, so ties go to the smaller magnitude.
double best_candidate(const SparsityPenalty& psi, double tau, double ax, std::initializer_list<double> cands) {
  std::array<double, 8> c{};
  std::size_t n = 0;
  for (double v : cands) c[n++] = std::clamp(v, 0.0, ax);
  std::sort(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n));
  double best = 0.0;
  double best_val = 0.5 * ax * ax;
  for (std::size_t i = 0; i < n; ++i) {
    const double val = tau * psi_eval(psi, c[i]) + 0.5 * (c[i] - ax) * (c[i] - ax);
    if (val < best_val) {
      best_val = val;
      best = c[i];
    }
  }
  return best;
}

double prox_mcp(const SparsityPenalty& psi, const penalty::Mcp& m, double tau, double ax) {
  const double knee = m.theta * m.lambda;
  const double curvature = 1.0 - tau / m.theta;
  double interior = 0.0;
  if (curvature > 0.0) interior = std::min((ax - tau * m.lambda) / curvature, knee);
  return best_candidate(psi, tau, ax, {0.0, interior, knee, ax});
}

double prox_scad(const SparsityPenalty& psi, const penalty::Scad& s, double tau, double ax) {
  const double lam = s.lambda;
  const double knee = s.theta * lam;
  const double linear = std::clamp(ax - tau * lam, 0.0, lam);
  const double curvature = 1.0 - tau / (s.theta - 1.0);
  double middle = lam;
  if (curvature > 0.0) {
    middle = std::clamp((ax - tau * knee / (s.theta - 1.0)) / curvature, lam, knee);
  }
  return best_candidate(psi, tau, ax, {0.0, linear, lam, middle, knee, ax});
}

// tau*((u+eps)^p - eps^p) + (u-x)^2/2 on u >= 0. Its derivative
// h(u) = u - x + tau p (u+eps)^(p-1) is convex with a single minimum at u_m,
// so there is at most one local minimizer in (0, x): the larger root of h.
// Compare it against u = 0.
double prox_relaxed_lp(const SparsityPenalty& psi, const penalty::RelaxedLp& l, double tau, double ax) {
  if (ax == 0.0) return 0.0;
  const double p = l.p;
  const double eps = l.eps;
  auto h = [&](double u) { return u - ax + tau * p * std::pow(u + eps, p - 1.0); };
  auto dh = [&](double u) { return 1.0 - tau * p * (1.0 - p) * std::pow(u + eps, p - 2.0); };

  const double u_min = std::max(std::pow(tau * p * (1.0 - p), 1.0 / (2.0 - p)) - eps, 0.0);
  if (u_min >= ax || h(u_min) > 0.0) return 0.0;

  // Safeguarded Newton from the right end: h is convex and increasing on
  // [lo, hi], so Newton iterates from hi decrease monotonically to the root.
  double lo = u_min;
  double hi = ax;
  double u = hi;
  for (int it = 0; it < 200; ++it) {
    const double hu = h(u);
    if (hu > 0.0) hi = u; else lo = u;
    double next = u - hu / dh(u);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(u, 1e-300)) {
      u = next;
      break;
    }
    u = next;
  }
  const double f0 = 0.5 * ax * ax;
  const double fu = tau * psi_eval(psi, u) + 0.5 * (u - ax) * (u - ax);
  return fu < f0 ? u : 0.0;
}

}  // namespace

SparsityPenalty::SparsityPenalty(Variant v) : v_(v) {
  std::visit(overloaded{
                 [](const penalty::L1&) {},
                 [](const penalty::RelaxedLp& l) {
                   if (!(l.p > 0.0 && l.p < 1.0)) throw ConfigError("relaxed lp: p must lie in (0, 1)");
                   if (!(l.eps > 0.0)) throw ConfigError("relaxed lp: eps must be positive");
                 },
                 [](const penalty::Mcp& m) {
                   if (!(m.lambda > 0.0)) throw ConfigError("mcp: lambda must be positive");
                   if (!(m.theta > m.lambda)) throw ConfigError("mcp: theta must exceed lambda");
                 },
                 [](const penalty::Scad& s) {
                   if (!(s.lambda > 0.0)) throw ConfigError("scad: lambda must be positive");
                   if (!(s.theta > 2.0)) throw ConfigError("scad: theta must exceed 2");
                 },
             },
             v_);
}

std::string SparsityPenalty::name() const {
  return std::visit(overloaded{
                        [](const penalty::L1&) { return std::string("l1"); },
                        [](const penalty::RelaxedLp&) { return std::string("relaxed-lp"); },
                        [](const penalty::Mcp&) { return std::string("mcp"); },
                        [](const penalty::Scad&) { return std::string("scad"); },
                    },
                    v_);
}

double psi_eval(const SparsityPenalty& psi, double t) {
  const double a = std::abs(t);
  return std::visit(overloaded{
                        [&](const penalty::L1&) { return a; },
                        [&](const penalty::RelaxedLp& l) { return std::pow(a + l.eps, l.p) - std::pow(l.eps, l.p); },
                        [&](const penalty::Mcp& m) {
                          if (a <= m.theta * m.lambda) return m.lambda * a - a * a / (2.0 * m.theta);
                          return 0.5 * m.theta * m.lambda * m.lambda;
                        },
                        [&](const penalty::Scad& s) {
                          const double lam = s.lambda;
                          if (a <= lam) return lam * a;
                          if (a <= s.theta * lam) {
                            return (-a * a + 2.0 * s.theta * lam * a - lam * lam) / (2.0 * (s.theta - 1.0));
                          }
                          return 0.5 * (s.theta + 1.0) * lam * lam;
                        },
                    },
                    psi.variant());
}

double psi_prox(const SparsityPenalty& psi, double tau, double x) {
  if (!(tau > 0.0)) throw ConfigError("psi_prox: tau must be positive");
  const double ax = std::abs(x);
  const double u = std::visit(overloaded{
                                  [&](const penalty::L1&) { return std::max(ax - tau, 0.0); },
                                  [&](const penalty::RelaxedLp& l) { return prox_relaxed_lp(psi, l, tau, ax); },
                                  [&](const penalty::Mcp& m) { return prox_mcp(psi, m, tau, ax); },
                                  [&](const penalty::Scad& s) { return prox_scad(psi, s, tau, ax); },
                              },
                              psi.variant());
  return std::signbit(x) ? -u : u;
}

Vector group_prox(const SparsityPenalty& psi, double tau, const Vector& s) {
  const double norm = s.norm();
  if (norm == 0.0) return Vector::Zero(s.size());
  return s * (psi_prox(psi, tau, norm) / norm);
}

double group_measure(const SparsityPenalty& psi, const Tensor3& s, kernels::Exec exec) {
  double total = 0.0;
  for (double n : kernels::fiber_norms(exec, s)) total += psi_eval(psi, n);
  return total;
}

double weak_convexity_tabulated(const SparsityPenalty& psi) {
  return std::visit(overloaded{
                        [](const penalty::L1&) { return 0.0; },
                        [](const penalty::RelaxedLp& l) { return l.p * std::pow(l.eps, l.p - 1.0); },
                        [](const penalty::Mcp& m) { return 1.0 / m.theta; },
                        [](const penalty::Scad& s) { return 1.0 / (s.theta - 1.0); },
                    },
                    psi.variant());
}

double weak_convexity_derived(const SparsityPenalty& psi) {
  if (const auto* l = std::get_if<penalty::RelaxedLp>(&psi.variant())) {
    return l->p * (1.0 - l->p) * std::pow(l->eps, l->p - 2.0);
  }
  return weak_convexity_tabulated(psi);
}

double weak_convexity(const SparsityPenalty& psi) {
  return std::max(weak_convexity_tabulated(psi), weak_convexity_derived(psi));
}

}  // namespace pnppbcd
