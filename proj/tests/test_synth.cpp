#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "pnppbcd/stiefel.hpp"
#include "pnppbcd/synth.hpp"

using namespace pnppbcd;

TEST(Synth, NoiseFreeAnomalyFreeIsExactlyLowRank) {
  SyntheticSpec sp;
  sp.dims = {20, 18, 12};
  sp.rank = 3;
  sp.anomalies = 0;
  sp.noise = 0.0;
  const auto sc = synth_scene(sp);
  Eigen::JacobiSVD<Matrix> svd(Matrix(sc.o.mode3()));
  const auto& s = svd.singularValues();
  EXPECT_GT(s(2), 1e-3 * s(0));
  EXPECT_LT(s(3), 1e-12 * s(0));
  EXPECT_EQ(frob_norm(sc.S), 0.0);
  EXPECT_EQ(frob_norm(sc.N), 0.0);
  EXPECT_TRUE(sc.o == sc.L);
}

TEST(Synth, Deterministic) {
  SyntheticSpec sp;
  sp.dims = {12, 10, 8};
  sp.seed = 99;
  const auto a = synth_scene(sp);
  const auto b = synth_scene(sp);
  EXPECT_TRUE(a.o == b.o);
  EXPECT_EQ(a.truth.data, b.truth.data);
  sp.seed = 100;
  EXPECT_FALSE(synth_scene(sp).o == a.o);
}

TEST(Synth, PartsAndTruthAreConsistent) {
  SyntheticSpec sp;
  sp.dims = {30, 25, 15};
  sp.rank = 4;
  sp.anomalies = 17;
  sp.magnitude = 0.8;
  sp.noise = 0.03;
  const auto sc = synth_scene(sp);
  EXPECT_LE(StiefelPoint::drift(sc.E), 1e-12);
  EXPECT_LE(frob_norm(sc.L + sc.S + sc.N - sc.o), 1e-12);
  Index count = 0;
  for (Index j = 0; j < 25; ++j)
    for (Index i = 0; i < 30; ++i) {
      const Vector f = fiber3(sc.S, i, j);
      if (sc.truth(i, j)) {
        ++count;
        EXPECT_NEAR(f.norm(), 0.8 * std::sqrt(15.0), 1e-12);
        EXPECT_LE((sc.E.transpose() * f).norm(), 1e-12);
      } else {
        EXPECT_EQ(f.norm(), 0.0);
      }
    }
  EXPECT_EQ(count, 17);
  const double sd = frob_norm(sc.N) / std::sqrt(static_cast<double>(sc.N.size()));
  EXPECT_NEAR(sd, 0.03, 0.001);
}

TEST(Synth, Validation) {
  SyntheticSpec sp;
  sp.dims = {4, 4, 3};
  sp.rank = 4;
  EXPECT_THROW(synth_scene(sp), ConfigError);
  sp.rank = 3;
  sp.anomalies = 2;
  EXPECT_THROW(synth_scene(sp), ConfigError);
  sp.rank = 2;
  sp.anomalies = 17;
  EXPECT_THROW(synth_scene(sp), ConfigError);
  sp.anomalies = 16;
  sp.noise = -1;
  EXPECT_THROW(synth_scene(sp), ConfigError);
  sp.noise = 0;
  EXPECT_NO_THROW(synth_scene(sp));
}
