#pragma once

// Sparsity-promoting penalties psi, the group measure ||S||_{2,psi} and their
// proximal maps. prox_{tau psi}(x) = argmin_u tau*psi(u) + (u - x)^2 / 2.

#include <string>
#include <variant>

#include "pnppbcd/kernels.hpp"
#include "pnppbcd/tensor.hpp"

namespace pnppbcd {

namespace penalty {
struct L1 {};
/// psi(t) = (|t| + eps)^p - eps^p, p in (0, 1), eps > 0.
struct RelaxedLp {
  double p;
  double eps;
};
/// Minimax concave penalty, theta > lambda > 0.
struct Mcp {
  double lambda;
  double theta;
};
/// Smoothly clipped absolute deviation, lambda > 0, theta > 2.
struct Scad {
  double lambda;
  double theta;
};
}  // namespace penalty

class SparsityPenalty {
 public:
  using Variant = std::variant<penalty::L1, penalty::RelaxedLp, penalty::Mcp, penalty::Scad>;

  /// Throws ConfigError if the parameters are outside their domain.
  explicit SparsityPenalty(Variant v);

  static SparsityPenalty l1() { return SparsityPenalty(penalty::L1{}); }
  static SparsityPenalty relaxed_lp(double p, double eps) { return SparsityPenalty(penalty::RelaxedLp{p, eps}); }
  static SparsityPenalty mcp(double lambda, double theta) { return SparsityPenalty(penalty::Mcp{lambda, theta}); }
  static SparsityPenalty scad(double lambda, double theta) { return SparsityPenalty(penalty::Scad{lambda, theta}); }

  const Variant& variant() const { return v_; }
  std::string name() const;

 private:
  Variant v_;
};

double psi_eval(const SparsityPenalty& psi, double t);

/// A minimizer of tau*psi(u) + (u - x)^2 / 2. Where the minimizer is not
/// unique the one of smallest magnitude is returned.
double psi_prox(const SparsityPenalty& psi, double tau, double x);

/// Proximal map of tau * psi(||.||_2): prox(|s|) * s / |s|, and 0 at s = 0.
Vector group_prox(const SparsityPenalty& psi, double tau, const Vector& s);

/// sum over pixels of psi(|s_{ij:}|_2).
double group_measure(const SparsityPenalty& psi, const Tensor3& s,
                     kernels::Exec exec = kernels::Exec::parallel);

/// Weak-convexity modulus as tabulated in the literature: 0, p*eps^(p-1),
/// 1/theta, 1/(theta-1).
double weak_convexity_tabulated(const SparsityPenalty& psi);

/// -inf psi'' over t != 0. Differs from the tabulated value only for the
/// relaxed lp penalty, where it is p(1-p) eps^(p-2).
double weak_convexity_derived(const SparsityPenalty& psi);

/// max of the two values above; the one used for step-size validation.
double weak_convexity(const SparsityPenalty& psi);

}  // namespace pnppbcd
