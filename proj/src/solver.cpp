#include "pnppbcd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/SVD>

namespace pnppbcd {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

void check_data(const Tensor3& o, const SolverConfig& cfg) {
  if (cfg.rank > o.n3()) {
    throw ConfigError("rank " + std::to_string(cfg.rank) + " exceeds the number of bands " + std::to_string(o.n3()));
  }
  if (!o.all_finite()) throw ConfigError("observation contains non-finite values");
}

// Leading r left singular vectors of X_(3), sign-fixed like project_stiefel.
Matrix leading_subspace(const Tensor3& o, Index r) {
  const Matrix x = o.mode3();
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU);
  Matrix u = svd.matrixU().leftCols(r);
  for (Index c = 0; c < r; ++c) {
    Index imax = 0;
    u.col(c).cwiseAbs().maxCoeff(&imax);
    if (u(imax, c) < 0.0) u.col(c) *= -1.0;
  }
  return u;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void SolverConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive");
  };
  auto nonneg = [](double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be >= 0");
  };
  positive(delta, "delta");
  positive(tau, "tau");
  positive(alpha_E, "alpha_E");
  nonneg(alpha_S, "alpha_S");
  nonneg(alpha_Z, "alpha_Z");
  nonneg(tol, "tol");
  if (rank < 1) throw ConfigError("rank must be >= 1");
  if (max_iter < 0 || min_iter < 0) throw ConfigError("iteration counts must be >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  positive(a, "a");
  if (!std::isfinite(b)) throw ConfigError("b must be finite");
  if (!sigmas.empty() && static_cast<Index>(sigmas.size()) != rank) {
    throw ConfigError("expected " + std::to_string(rank) + " noise levels, got " + std::to_string(sigmas.size()));
  }
  for (double s : sigmas) nonneg(s, "noise level");
  if (!(alpha_S + pos(alpha_S + delta - rho1()) > 0.0)) {
    throw ConfigError("alpha_S + (alpha_S + delta - rho1)+ must be positive");
  }
}

double SolverConfig::rho1() const { return tau * weak_convexity(penalty); }

double decrease_constant(const SolverConfig& cfg, const DenoiserSpec& spec) {
  const double cs = cfg.alpha_S + pos(cfg.alpha_S + cfg.delta - cfg.rho1());
  const double cz = cfg.alpha_Z + pos(cfg.alpha_Z + cfg.delta - spec.rho2());
  return std::min({cs, cfg.alpha_E, cz});
}

DenoiserSpec make_denoiser(const SolverConfig& cfg, const Tensor3& z) {
  std::vector<SmoothPrior> priors;
  if (cfg.prior == SmoothPrior::Kind::identity) {
    priors.assign(static_cast<std::size_t>(z.n3()), SmoothPrior::identity());
  } else {
    std::vector<double> sig = cfg.sigmas.empty() ? estimate_band_sigmas(z, cfg.a, cfg.b, cfg.sigma_policy) : cfg.sigmas;
    for (double s : sig) priors.push_back(SmoothPrior::linear_smoother(s));
  }
  DenoiserSpec spec(std::move(priors), cfg.gamma, cfg.a, cfg.b, cfg.lambda());
  if (!(cfg.alpha_Z + pos(cfg.alpha_Z + cfg.delta - spec.rho2()) > 0.0)) {
    throw ConfigError("alpha_Z + (alpha_Z + delta - rho2)+ must be positive");
  }
  return spec;
}

SolverState initialize(const Tensor3& o, const SolverConfig& cfg) {
  cfg.validate();
  check_data(o, cfg);
  StiefelPoint e(leading_subspace(o, cfg.rank));
  Tensor3 z_init = kernels::mode3_contract(cfg.exec, o, e.matrix());
  DenoiserSpec spec = make_denoiser(cfg, z_init);
  Tensor3 z = denoise_all(spec, z_init, cfg.exec);
  Tensor3 l = kernels::mode3_product(cfg.exec, z, e.matrix());
  return SolverState{std::move(z), std::move(e), Tensor3(o.dims()), std::move(z_init), std::move(l),
                     std::move(spec), 0, false};
}

Tensor3 update_S(const SolverState& st, const Tensor3& o, const SolverConfig& cfg) {
  if (o.dims() != st.S.dims()) throw ShapeError("update_S: observation shape differs from state");
  const double step = cfg.delta / (cfg.delta + cfg.alpha_S);
  const double tau_t = cfg.tau / (cfg.delta + cfg.alpha_S);
  Tensor3 s_hat = st.S;
  auto sh = s_hat.data();
  auto l = st.L.data();
  auto od = o.data();
  for (std::size_t i = 0; i < sh.size(); ++i) sh[i] = sh[i] - step * (sh[i] + l[i] - od[i]);
  const SparsityPenalty& psi = cfg.penalty;
  kernels::group_shrink(cfg.exec, s_hat, [&psi, tau_t](double n) { return psi_prox(psi, tau_t, n); });
  return s_hat;
}

StiefelProjection update_E(const SolverState& st, const Tensor3& o, const SolverConfig& cfg, const Tensor3& s_new) {
  const Matrix g = kernels::mode3_gram(cfg.exec, o - s_new, st.Z);
  return project_stiefel(st.E.matrix() + (cfg.delta / cfg.alpha_E) * g);
}

ZUpdate update_Z(const SolverState& st, const Tensor3& o, const SolverConfig& cfg, const Tensor3& s_new,
                 const StiefelPoint& e_new) {
  const double step = cfg.delta / (cfg.delta + cfg.alpha_Z);
  const Tensor3 w = kernels::mode3_contract(cfg.exec, o - s_new, e_new.matrix());
  Tensor3 z_hat = st.Z;
  auto zh = z_hat.data();
  auto wd = w.data();
  for (std::size_t i = 0; i < zh.size(); ++i) zh[i] = zh[i] - step * (zh[i] - wd[i]);
  Tensor3 z = denoise_all(st.denoiser, z_hat, cfg.exec);
  return {std::move(z), std::move(z_hat)};
}

double data_term(const Tensor3& z, const StiefelPoint& e, const Tensor3& s, const Tensor3& o, double delta,
                 kernels::Exec exec) {
  Tensor3 r = kernels::mode3_product(exec, z, e.matrix());
  r += s;
  r -= o;
  return 0.5 * delta * inner(r, r);
}

double objective_F(const SolverState& st, const Tensor3& o, const SolverConfig& cfg) {
  return data_term(st.Z, st.E, st.S, o, cfg.delta, cfg.exec) + cfg.tau * group_measure(cfg.penalty, st.S, cfg.exec) +
         prior_value(st.denoiser, st.Z, st.Zhat);
}

double subproblem_S(const Tensor3& s, const SolverState& st, const Tensor3& o, const SolverConfig& cfg) {
  const Tensor3 d = s - st.S;
  return data_term(st.Z, st.E, s, o, cfg.delta, cfg.exec) + cfg.tau * group_measure(cfg.penalty, s, cfg.exec) +
         0.5 * cfg.alpha_S * inner(d, d);
}

double subproblem_E(const StiefelPoint& e, const SolverState& st, const Tensor3& o, const SolverConfig& cfg,
                    const Tensor3& s_new) {
  return data_term(st.Z, e, s_new, o, cfg.delta, cfg.exec) +
         0.5 * cfg.alpha_E * (e.matrix() - st.E.matrix()).squaredNorm();
}

double subproblem_Z(const Tensor3& z, const Tensor3& z_hat, const SolverState& st, const Tensor3& o,
                    const SolverConfig& cfg, const Tensor3& s_new, const StiefelPoint& e_new) {
  const Tensor3 d = z - st.Z;
  return data_term(z, e_new, s_new, o, cfg.delta, cfg.exec) + prior_value(st.denoiser, z, z_hat) +
         0.5 * cfg.alpha_Z * inner(d, d);
}

Residuals residuals(const SolverState& prev, const SolverState& cur, const Tensor3& o, const SolverConfig& cfg) {
  Tensor3 as = cfg.delta * (cur.L - prev.L);
  as -= cfg.alpha_S * (cur.S - prev.S);
  Residuals r;
  r.S = frob_norm(as);
  r.E = riemannian_grad_H(cur.Z, cur.E, cur.S, o, cfg.delta).norm();
  r.Z = cfg.alpha_Z * frob_norm(cur.Z - prev.Z);
  return r;
}

RunResult run(const Tensor3& o, const SolverConfig& cfg) {
  SolverState st = initialize(o, cfg);
  RunResult out{st, {}, decrease_constant(cfg, st.denoiser), false};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double scale_abs = std::sqrt(static_cast<double>(o.size())) * std::numeric_limits<double>::epsilon();

  HistoryEntry h0;
  h0.F = objective_F(st, o, cfg);
  h0.margin = h0.res.S = h0.res.E = h0.res.Z = h0.rel_dS = nan;
  h0.dS = h0.dE = h0.dZ = h0.dL = nan;
  h0.norm_Z = frob_norm(st.Z);
  h0.norm_S = 0.0;
  out.history.push_back(h0);

  for (int k = 1; k <= cfg.max_iter; ++k) {
    Tensor3 s_new = update_S(st, o, cfg);
    StiefelProjection e_new = update_E(st, o, cfg, s_new);
    ZUpdate z_new = update_Z(st, o, cfg, s_new, e_new.point);
    Tensor3 l_new = kernels::mode3_product(cfg.exec, z_new.Z, e_new.point.matrix());

    SolverState next{std::move(z_new.Z), std::move(e_new.point), std::move(s_new), std::move(z_new.Zhat),
                     std::move(l_new), st.denoiser, k, e_new.rank_deficient};

    HistoryEntry h;
    h.iter = k;
    h.F = objective_F(next, o, cfg);
    h.dS = frob_norm(next.S - st.S);
    h.dE = (next.E.matrix() - st.E.matrix()).norm();
    h.dZ = frob_norm(next.Z - st.Z);
    h.dL = frob_norm(next.L - st.L);
    const double prev_F = out.history.back().F;
    h.margin = prev_F - h.F - 0.5 * out.c1 * (h.dS * h.dS + h.dE * h.dE + h.dZ * h.dZ);
    h.res = residuals(st, next, o, cfg);
    const double norm_s_prev = frob_norm(st.S);
    h.rel_dS = norm_s_prev > 0.0 ? h.dS / norm_s_prev : nan;
    h.norm_Z = frob_norm(next.Z);
    h.norm_S = frob_norm(next.S);
    h.rank_deficient = next.rank_deficient;
    out.history.push_back(h);

    if (h.F > prev_F + 1e-9 * std::max(1.0, std::abs(prev_F))) {
      std::ostringstream msg;
      msg << "objective increased at iteration " << k << ": F " << fmt(prev_F) << " -> " << fmt(h.F)
          << ", |dS| " << fmt(h.dS) << ", |dE| " << fmt(h.dE) << ", |dZ| " << fmt(h.dZ);
      throw InvariantViolation(msg.str());
    }

    st = std::move(next);
    if (k >= cfg.min_iter) {
      const bool stop = norm_s_prev > 0.0 ? h.dS <= cfg.tol * norm_s_prev : h.dS <= cfg.tol * scale_abs;
      if (stop) {
        out.converged = true;
        break;
      }
    }
  }
  out.state = std::move(st);
  return out;
}

void write_history_csv(std::ostream& out, const std::vector<HistoryEntry>& history) {
  out << "iter,F,decrease_margin,res_S,res_E,res_Z,rel_dS\n";
  for (const auto& h : history) {
    out << h.iter << ',' << fmt(h.F) << ',' << fmt(h.margin) << ',' << fmt(h.res.S) << ',' << fmt(h.res.E) << ','
        << fmt(h.res.Z) << ',' << fmt(h.rel_dS) << '\n';
  }
}

}  // namespace pnppbcd
