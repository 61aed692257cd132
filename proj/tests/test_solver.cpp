#include <cstring>
#include <sstream>

#include <gtest/gtest.h>
#include <omp.h>

#include "helpers.hpp"
#include "pnppbcd/detector.hpp"
#include "pnppbcd/solver.hpp"
#include "pnppbcd/synth.hpp"

using namespace pnppbcd;
using namespace testing_helpers;

namespace {

SyntheticScene small_scene(Index anomalies, double noise, std::uint64_t seed = 3) {
  SyntheticSpec sp;
  sp.dims = {16, 14, 10};
  sp.rank = 3;
  sp.anomalies = anomalies;
  sp.noise = noise;
  sp.seed = seed;
  sp.blobs = 1;
  return synth_scene(sp);
}

SolverConfig small_config(SmoothPrior::Kind prior = SmoothPrior::Kind::linear_smoother) {
  SolverConfig cfg;
  cfg.rank = 3;
  cfg.prior = prior;
  return cfg;
}

SolverState step(const SolverState& st, const Tensor3& o, const SolverConfig& cfg) {
  Tensor3 s = update_S(st, o, cfg);
  StiefelProjection e = update_E(st, o, cfg, s);
  ZUpdate z = update_Z(st, o, cfg, s, e.point);
  Tensor3 l = mode3_product(z.Z, e.point.matrix());
  return {std::move(z.Z), e.point, std::move(s), std::move(z.Zhat), std::move(l), st.denoiser, st.k + 1, false};
}

}  // namespace

TEST(SolverConfigType, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.alpha_E = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = SolverConfig{};
  cfg.delta = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = SolverConfig{};
  cfg.rank = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = SolverConfig{};
  cfg.sigmas = {0.1, 0.2};
  EXPECT_THROW(cfg.validate(), ConfigError);
  // rho1 of the default relaxed lp is huge, so alpha_S = 0 violates the
  // step-size hypothesis.
  cfg = SolverConfig{};
  cfg.alpha_S = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.penalty = SparsityPenalty::l1();
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_DOUBLE_EQ(SolverConfig{}.lambda(), 0.26);
}

TEST(SolverConfigType, DecreaseConstant) {
  SolverConfig cfg;
  const DenoiserSpec spec({SmoothPrior::linear_smoother(0.05)}, 0.99, 0.2, 0.4, cfg.lambda());
  EXPECT_DOUBLE_EQ(decrease_constant(cfg, spec), 0.01);
  cfg.penalty = SparsityPenalty::l1();
  cfg.alpha_E = 1.0;
  const double rho2 = spec.rho2();
  EXPECT_DOUBLE_EQ(decrease_constant(cfg, spec), std::min(0.01 + 0.26, 0.01 + 0.26 - rho2));
}

TEST(Initialize, ExactLowRankReconstruction) {
  const auto sc = small_scene(0, 0.0);
  const SolverState st = initialize(sc.o, small_config());
  EXPECT_LE(StiefelPoint::drift(st.E.matrix()), 1e-10);
  EXPECT_LE(frob_norm(mode3_product(st.Zhat, st.E.matrix()) - sc.o), 1e-8 * frob_norm(sc.o));
  EXPECT_EQ(frob_norm(st.S), 0.0);
  // Z0 is the denoised initial coefficient tensor.
  EXPECT_TRUE(st.Z == denoise_all(st.denoiser, st.Zhat));
}

TEST(Initialize, FullRankAndZeroInputs) {
  std::mt19937_64 rng(71);
  const Tensor3 o = random_tensor(rng, 6, 5, 4);
  SolverConfig cfg = small_config();
  cfg.rank = 4;
  const SolverState st = initialize(o, cfg);
  EXPECT_LE(frob_norm(mode3_product(st.Zhat, st.E.matrix()) - o), 1e-10 * frob_norm(o));
  const SolverState zero = initialize(Tensor3(6, 5, 4), cfg);
  EXPECT_LE(frob_norm(zero.Z), 1e-14);
  EXPECT_EQ(frob_norm(zero.S), 0.0);
  cfg.rank = 5;
  EXPECT_THROW(initialize(o, cfg), ConfigError);
}

TEST(UpdateS, ZeroResidualGivesZero) {
  const auto sc = small_scene(0, 0.0);
  const auto cfg = small_config(SmoothPrior::Kind::identity);
  const SolverState st = initialize(sc.o, cfg);
  EXPECT_EQ(frob_norm(update_S(st, sc.o, cfg)), 0.0);
}

TEST(UpdateS, SingleFiberSoftThreshold) {
  const auto sc = small_scene(0, 0.0);
  SolverConfig cfg = small_config(SmoothPrior::Kind::identity);
  cfg.penalty = SparsityPenalty::l1();
  const SolverState st = initialize(sc.o, cfg);
  Tensor3 o = st.L;
  Vector v(10);
  for (Index b = 0; b < 10; ++b) v(b) = std::sin(1.0 + b);
  v *= 20.0 / v.norm();
  for (Index b = 0; b < 10; ++b) o(4, 5, b) += v(b);
  const Tensor3 s = update_S(st, o, cfg);
  const double step = cfg.delta / (cfg.delta + cfg.alpha_S);
  const double tau_t = cfg.tau / (cfg.delta + cfg.alpha_S);
  const Vector f = fiber3(s, 4, 5);
  EXPECT_NEAR(f.norm(), step * 20.0 - tau_t, 1e-12);
  EXPECT_NEAR(f.dot(v), f.norm() * v.norm(), 1e-9);
  Tensor3 rest = s;
  for (Index b = 0; b < 10; ++b) rest(4, 5, b) = 0.0;
  EXPECT_EQ(frob_norm(rest), 0.0);
}

TEST(UpdateS, FibersCollinearWithGradientStep) {
  const auto sc = small_scene(10, 0.03);
  const auto cfg = small_config();
  SolverState st = initialize(sc.o, cfg);
  st = step(st, sc.o, cfg);
  const Tensor3 s = update_S(st, sc.o, cfg);
  const double a = cfg.delta / (cfg.delta + cfg.alpha_S);
  const Tensor3 shat = st.S - a * (st.S + st.L - sc.o);
  for (Index j = 0; j < s.n2(); ++j)
    for (Index i = 0; i < s.n1(); ++i) {
      const Vector f = fiber3(s, i, j);
      const Vector g = fiber3(shat, i, j);
      if (f.norm() == 0.0) continue;
      EXPECT_NEAR(f.dot(g), f.norm() * g.norm(), 1e-10 * g.squaredNorm());
    }
}

TEST(UpdateE, FixedCases) {
  const auto sc = small_scene(5, 0.03);
  const auto cfg = small_config();
  const SolverState st = initialize(sc.o, cfg);
  EXPECT_LE((update_E(st, sc.o, cfg, sc.o).point.matrix() - st.E.matrix()).norm(), 1e-12);
  SolverState zero_z = st;
  zero_z.Z = Tensor3(st.Z.dims());
  EXPECT_LE((update_E(zero_z, sc.o, cfg, Tensor3(sc.o.dims())).point.matrix() - st.E.matrix()).norm(), 1e-12);
}

TEST(PerBlockDescent, EachUpdateDecreasesItsSubproblem) {
  const auto sc = small_scene(10, 0.03, 5);
  const auto cfg = small_config();
  SolverState st = initialize(sc.o, cfg);
  for (int k = 0; k < 15; ++k) {
    const Tensor3 s = update_S(st, sc.o, cfg);
    EXPECT_LE(subproblem_S(s, st, sc.o, cfg), subproblem_S(st.S, st, sc.o, cfg) + 1e-10);
    const StiefelProjection e = update_E(st, sc.o, cfg, s);
    EXPECT_LE(StiefelPoint::drift(e.point.matrix()), 1e-10);
    EXPECT_LE(subproblem_E(e.point, st, sc.o, cfg, s), subproblem_E(st.E, st, sc.o, cfg, s) + 1e-10);
    const ZUpdate z = update_Z(st, sc.o, cfg, s, e.point);
    EXPECT_LE(subproblem_Z(z.Z, z.Zhat, st, sc.o, cfg, s, e.point),
              subproblem_Z(st.Z, st.Zhat, st, sc.o, cfg, s, e.point) + 1e-10);
    st = step(st, sc.o, cfg);
  }
}

TEST(UpdateZ, IdentityPriorNoProximalTermIsLeastSquares) {
  const auto sc = small_scene(5, 0.03);
  SolverConfig cfg = small_config(SmoothPrior::Kind::identity);
  cfg.alpha_Z = 0.0;
  const SolverState st = initialize(sc.o, cfg);
  const Tensor3 s = update_S(st, sc.o, cfg);
  const StiefelProjection e = update_E(st, sc.o, cfg, s);
  const ZUpdate z = update_Z(st, sc.o, cfg, s, e.point);
  EXPECT_LE(frob_norm(z.Z - mode3_contract(sc.o - s, e.point.matrix())), 1e-12);

  SolverState zero = st;
  zero.Z = Tensor3(st.Z.dims());
  EXPECT_EQ(frob_norm(update_Z(zero, sc.o, cfg, sc.o, e.point).Z), 0.0);
}

TEST(Objective, Examples) {
  const auto sc = small_scene(5, 0.03);
  const auto cfg = small_config(SmoothPrior::Kind::identity);
  SolverState st = initialize(sc.o, cfg);
  st.Z = Tensor3(st.Z.dims());
  st.Zhat = st.Z;
  st.S = sc.o;
  EXPECT_NEAR(objective_F(st, sc.o, cfg), cfg.tau * group_measure(cfg.penalty, sc.o), 1e-12);
  st.S = Tensor3(sc.o.dims());
  EXPECT_NEAR(objective_F(st, sc.o, cfg), 0.5 * cfg.delta * inner(sc.o, sc.o), 1e-10);
}

TEST(Residuals, StationaryInput) {
  const auto sc = small_scene(0, 0.0);
  const auto cfg = small_config(SmoothPrior::Kind::identity);
  const SolverState st = initialize(sc.o, cfg);
  const SolverState next = step(st, sc.o, cfg);
  const Residuals r = residuals(st, next, sc.o, cfg);
  EXPECT_LE(r.S, 1e-8);
  EXPECT_LE(r.E, 1e-8);
  EXPECT_LE(r.Z, 1e-8);
}

TEST(Residuals, ZeroProximalWeights) {
  const auto sc = small_scene(5, 0.03);
  SolverConfig cfg = small_config();
  cfg.alpha_Z = 0.0;
  cfg.alpha_S = 0.0;
  cfg.penalty = SparsityPenalty::l1();
  const SolverState st = initialize(sc.o, cfg);
  const SolverState next = step(st, sc.o, cfg);
  const Residuals r = residuals(st, next, sc.o, cfg);
  EXPECT_EQ(r.Z, 0.0);
  EXPECT_NEAR(r.S, cfg.delta * frob_norm(next.L - st.L), 1e-12);
}

TEST(Run, MonotoneWithSufficientDecrease) {
  const auto sc = small_scene(10, 0.03, 7);
  SolverConfig cfg = small_config();
  cfg.max_iter = cfg.min_iter = 50;
  const RunResult res = run(sc.o, cfg);
  ASSERT_EQ(res.history.size(), 51u);
  for (std::size_t i = 1; i < res.history.size(); ++i) {
    const auto& h = res.history[i];
    EXPECT_LE(h.F, res.history[i - 1].F * (1 + 1e-9));
    EXPECT_GE(h.margin, -1e-9 * std::max(1.0, res.history[i - 1].F)) << "iteration " << h.iter;
    EXPECT_TRUE(std::isfinite(h.norm_Z) && std::isfinite(h.norm_S));
  }
  EXPECT_NEAR(res.state.E.matrix().norm(), std::sqrt(static_cast<double>(cfg.rank)), 1e-10);
}

TEST(Run, MaxIterZeroReturnsInitialization) {
  const auto sc = small_scene(5, 0.03);
  SolverConfig cfg = small_config();
  cfg.max_iter = 0;
  const RunResult res = run(sc.o, cfg);
  const SolverState init = initialize(sc.o, cfg);
  EXPECT_TRUE(res.state.Z == init.Z);
  EXPECT_TRUE(res.state.S == init.S);
  EXPECT_TRUE(res.state.E.matrix() == init.E.matrix());
  EXPECT_EQ(res.history.size(), 1u);
}

TEST(Run, ExactBackgroundConverges) {
  const auto sc = small_scene(0, 0.0);
  SolverConfig cfg = small_config(SmoothPrior::Kind::identity);
  const RunResult res = run(sc.o, cfg);
  EXPECT_TRUE(res.converged);
  EXPECT_LE(frob_norm(res.state.S), 1e-6 * frob_norm(sc.o));
  EXPECT_LE(frob_norm(res.state.L + res.state.S - sc.o), 1e-6 * frob_norm(sc.o));
}

TEST(Run, PlantedAnomaliesNoiseFreeRecovered) {
  const auto sc = small_scene(8, 0.0, 11);
  SolverConfig cfg = small_config();
  cfg.max_iter = 200;
  // Anomaly fibers here have norm ~2.5; tau = 1 thresholds them all away.
  cfg.tau = 0.1;
  const RunResult res = run(sc.o, cfg);
  EXPECT_DOUBLE_EQ(roc_auc(anomaly_scores(res.state.S), sc.truth).auc, 1.0);
}

TEST(Run, SerialAndParallelBitwiseEqual) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  const auto sc = small_scene(10, 0.03, 13);
  SolverConfig cfg = small_config();
  cfg.max_iter = cfg.min_iter = 30;
  cfg.exec = kernels::Exec::serial;
  const RunResult a = run(sc.o, cfg);
  cfg.exec = kernels::Exec::parallel;
  const RunResult b = run(sc.o, cfg);
  omp_set_num_threads(saved);
  EXPECT_TRUE(a.state.S == b.state.S);
  EXPECT_TRUE(a.state.Z == b.state.Z);
  EXPECT_TRUE(a.state.E.matrix() == b.state.E.matrix());
  std::ostringstream ha, hb;
  write_history_csv(ha, a.history);
  write_history_csv(hb, b.history);
  EXPECT_EQ(ha.str(), hb.str());
}

TEST(Run, SuccessiveDifferencesSummable) {
  const auto sc = small_scene(10, 0.03, 17);
  SolverConfig cfg = small_config();
  cfg.max_iter = cfg.min_iter = 120;
  const RunResult res = run(sc.o, cfg);
  const auto& h = res.history;
  double sum_sq = 0.0;
  for (std::size_t i = 1; i < h.size(); ++i) sum_sq += h[i].dS * h[i].dS + h[i].dE * h[i].dE + h[i].dZ * h[i].dZ;
  // Summing the sufficient-decrease inequality bounds the total by 2 (F0 - Fk) / c1.
  EXPECT_LE(sum_sq, 2.0 * (h.front().F - h.back().F) / res.c1 + 1e-9);
  EXPECT_LT(h.back().dL, 1e-3 * h[1].dL);
  EXPECT_LT(h.back().dS + h.back().dE + h.back().dZ, 1e-3 * (h[1].dS + h[1].dE + h[1].dZ));
}

TEST(History, CsvLayout) {
  const auto sc = small_scene(5, 0.03);
  SolverConfig cfg = small_config();
  cfg.max_iter = 3;
  cfg.min_iter = 3;
  const RunResult res = run(sc.o, cfg);
  std::ostringstream out;
  write_history_csv(out, res.history);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "iter,F,decrease_margin,res_S,res_E,res_Z,rel_dS");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 2), "0,");
  EXPECT_NE(line.find(",nan,nan,nan,nan,nan"), std::string::npos);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}
