#pragma once

// Three-block proximal coordinate descent on
//   F(Z, E, S) = (delta/2)|Z x_3 E + S - O|^2 + tau |S|_{2,psi} + Phi(Z),
// updating S, then E, then Z each sweep.
//
// Phi(Z) = lambda sum_n phi~(Z_n) is the potential of the shifted denoiser.
// The Z-update is exact only when lambda = delta + alpha_Z, so lambda is
// derived from the config rather than set independently.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pnppbcd/denoiser.hpp"
#include "pnppbcd/kernels.hpp"
#include "pnppbcd/prox.hpp"
#include "pnppbcd/stiefel.hpp"
#include "pnppbcd/tensor.hpp"

namespace pnppbcd {

struct SolverConfig {
  double delta = 0.25;
  double tau = 1.0;
  Index rank = 4;
  double alpha_S = 0.01;
  double alpha_E = 0.01;
  double alpha_Z = 0.01;
  SparsityPenalty penalty = SparsityPenalty::relaxed_lp(0.1, 1e-5);

  SmoothPrior::Kind prior = SmoothPrior::Kind::linear_smoother;
  double gamma = 0.99;
  double a = 0.2;
  double b = 0.4;
  SigmaPolicy sigma_policy = SigmaPolicy::pooled;
  /// Per-band noise levels; when non-empty (size rank) they replace the
  /// data-driven estimate.
  std::vector<double> sigmas;

  int max_iter = 300;
  /// Iterations always performed before the stopping test is consulted.
  int min_iter = 0;
  /// Relative change |S^{k+1} - S^k| / |S^k| at which the run stops.
  double tol = 1e-3;
  kernels::Exec exec = kernels::Exec::parallel;

  /// Throws ConfigError on any out-of-domain field.
  void validate() const;

  double lambda() const { return delta + alpha_Z; }
  /// tau * weak_convexity(penalty)
  double rho1() const;
};

struct SolverState {
  Tensor3 Z;
  StiefelPoint E;
  Tensor3 S;
  /// Preimage of Z under the denoiser, needed to evaluate Phi(Z).
  Tensor3 Zhat;
  /// Z x_3 E
  Tensor3 L;
  DenoiserSpec denoiser;
  int k = 0;
  bool rank_deficient = false;
};

/// Sufficient-decrease constant
/// min{aS + (aS + delta - rho1)+, aE, aZ + (aZ + delta - rho2)+}.
double decrease_constant(const SolverConfig& cfg, const DenoiserSpec& spec);

/// Builds the denoiser for Z (n1, n2, rank) from cfg, estimating noise levels
/// from Z when cfg.sigmas is empty.
DenoiserSpec make_denoiser(const SolverConfig& cfg, const Tensor3& z);

/// E0 = leading rank left singular vectors of O_(3), Z = O x_3 E0^T, S = 0,
/// followed by one Z-update so that Z0 has a known preimage.
SolverState initialize(const Tensor3& o, const SolverConfig& cfg);

Tensor3 update_S(const SolverState& st, const Tensor3& o, const SolverConfig& cfg);
StiefelProjection update_E(const SolverState& st, const Tensor3& o, const SolverConfig& cfg, const Tensor3& s_new);

struct ZUpdate {
  Tensor3 Z;
  Tensor3 Zhat;
};
ZUpdate update_Z(const SolverState& st, const Tensor3& o, const SolverConfig& cfg, const Tensor3& s_new,
                 const StiefelPoint& e_new);

/// (delta/2)|Z x_3 E + S - O|^2
double data_term(const Tensor3& z, const StiefelPoint& e, const Tensor3& s, const Tensor3& o, double delta,
                 kernels::Exec exec = kernels::Exec::parallel);

double objective_F(const SolverState& st, const Tensor3& o, const SolverConfig& cfg);

// Block subproblem objectives. Each update minimizes its own objective, with
// the other blocks held at the values named in the argument list.
double subproblem_S(const Tensor3& s, const SolverState& st, const Tensor3& o, const SolverConfig& cfg);
double subproblem_E(const StiefelPoint& e, const SolverState& st, const Tensor3& o, const SolverConfig& cfg,
                    const Tensor3& s_new);
/// z_hat is the preimage of z (needed for Phi).
double subproblem_Z(const Tensor3& z, const Tensor3& z_hat, const SolverState& st, const Tensor3& o,
                    const SolverConfig& cfg, const Tensor3& s_new, const StiefelPoint& e_new);

struct Residuals {
  double S = 0.0;
  double E = 0.0;
  double Z = 0.0;
};

/// Norms of the stationarity certificates
///   A_S = -alpha_S (S^k - S^{k-1}) + delta (L^k - L^{k-1}),
///   A_E = riemannian gradient of H at the current state,
///   A_Z = -alpha_Z (Z^k - Z^{k-1}).
Residuals residuals(const SolverState& prev, const SolverState& cur, const Tensor3& o, const SolverConfig& cfg);

/// One record per sweep; iteration 0 holds the initial objective only.
struct HistoryEntry {
  int iter = 0;
  double F = 0.0;
  /// F(prev) - F(cur) - (c1/2)(|dS|^2 + |dE|^2 + |dZ|^2)
  double margin = 0.0;
  Residuals res;
  double rel_dS = 0.0;
  double dS = 0.0;
  double dE = 0.0;
  double dZ = 0.0;
  double dL = 0.0;
  double norm_Z = 0.0;
  double norm_S = 0.0;
  bool rank_deficient = false;
};

struct RunResult {
  SolverState state;
  std::vector<HistoryEntry> history;
  double c1 = 0.0;
  bool converged = false;
};

/// Runs sweeps until the relative S change drops to tol (after min_iter
/// sweeps) or max_iter is reached. When |S^k| = 0 the test becomes
/// |S^{k+1} - S^k| <= tol sqrt(N) eps_mach. Throws InvariantViolation if F
/// grows by more than 1e-9 relative.
RunResult run(const Tensor3& o, const SolverConfig& cfg);

/// Header iter,F,decrease_margin,res_S,res_E,res_Z,rel_dS; undefined entries
/// of the iteration-0 row are written as nan.
void write_history_csv(std::ostream& out, const std::vector<HistoryEntry>& history);

}  // namespace pnppbcd
