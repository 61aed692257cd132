// Serial reference kernels against their OpenMP versions, plus one full
// solver sweep, at the desk-scale scene size (50 x 50 x 30, rank 4).
//
//   ./build/bench/bench_kernels --benchmark_filter=Gram

#include <random>

#include <Eigen/Cholesky>
#include <benchmark/benchmark.h>

#include "pnppbcd/denoiser.hpp"
#include "pnppbcd/kernels.hpp"
#include "pnppbcd/solver.hpp"
#include "pnppbcd/synth.hpp"

using namespace pnppbcd;
using kernels::Exec;

namespace {

constexpr Index kN1 = 50, kN2 = 50, kN3 = 30, kRank = 4;

Tensor3 random_tensor(Index n1, Index n2, Index n3, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Tensor3 t(n1, n2, n3);
  for (double& v : t.data()) v = nd(rng);
  return t;
}

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) == 0 ? "serial" : "omp"); }

void BM_Mode3Product(benchmark::State& st) {
  const Tensor3 z = random_tensor(kN1, kN2, kRank, 1);
  const Matrix e = random_matrix(kN3, kRank, 2);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::mode3_product(exec_of(st), z, e));
  label(st);
}

void BM_Mode3Contract(benchmark::State& st) {
  const Tensor3 x = random_tensor(kN1, kN2, kN3, 3);
  const Matrix e = random_matrix(kN3, kRank, 4);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::mode3_contract(exec_of(st), x, e));
  label(st);
}

void BM_Mode3Gram(benchmark::State& st) {
  const Tensor3 x = random_tensor(kN1, kN2, kN3, 5);
  const Tensor3 z = random_tensor(kN1, kN2, kRank, 6);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::mode3_gram(exec_of(st), x, z));
  label(st);
}

void BM_FiberNorms(benchmark::State& st) {
  const Tensor3 x = random_tensor(kN1, kN2, kN3, 7);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::fiber_norms(exec_of(st), x));
  label(st);
}

void BM_GroupShrink(benchmark::State& st) {
  const Tensor3 x = random_tensor(kN1, kN2, kN3, 8);
  const auto psi = SparsityPenalty::relaxed_lp(0.1, 1e-5);
  const kernels::RadialMap radial = [&](double n) { return psi_prox(psi, 2.0, n); };
  for (auto _ : st) {
    Tensor3 t = x;
    kernels::group_shrink(exec_of(st), t, radial);
    benchmark::DoNotOptimize(t.data().data());
  }
  label(st);
}

void BM_Smoother(benchmark::State& st) {
  const Matrix img = random_matrix(kN1, kN2, 9);
  Matrix out;
  for (auto _ : st) {
    kernels::smooth_periodic(exec_of(st), img, 0.2, out);
    benchmark::DoNotOptimize(out.data());
  }
  label(st);
}

void BM_WhitenedNorms(benchmark::State& st) {
  const Tensor3 x = random_tensor(kN1, kN2, kN3, 10);
  const Vector mean = Vector::Zero(kN3);
  const Matrix a = random_matrix(kN3, kN3, 11);
  const Matrix chol = (a * a.transpose() + Matrix::Identity(kN3, kN3)).llt().matrixL();
  for (auto _ : st) benchmark::DoNotOptimize(kernels::whitened_sq_norms(exec_of(st), x, mean, chol));
  label(st);
}

void BM_SolverSweep(benchmark::State& st) {
  SyntheticSpec spec;
  const SyntheticScene scene = synth_scene(spec);
  SolverConfig cfg;
  cfg.exec = exec_of(st);
  cfg.max_iter = 10;
  cfg.min_iter = 10;
  for (auto _ : st) benchmark::DoNotOptimize(run(scene.o, cfg).history.size());
  label(st);
}

}  // namespace

BENCHMARK(BM_Mode3Product)->Arg(0)->Arg(1);
BENCHMARK(BM_Mode3Contract)->Arg(0)->Arg(1);
BENCHMARK(BM_Mode3Gram)->Arg(0)->Arg(1);
BENCHMARK(BM_FiberNorms)->Arg(0)->Arg(1);
BENCHMARK(BM_GroupShrink)->Arg(0)->Arg(1);
BENCHMARK(BM_Smoother)->Arg(0)->Arg(1);
BENCHMARK(BM_WhitenedNorms)->Arg(0)->Arg(1);
BENCHMARK(BM_SolverSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
