// Serial vs OpenMP timings of the data-parallel kernels.

#include "fsi/kernels.hpp"
#include "fsi/lyapunov.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace fsi;

namespace {

Mat random_matrix(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Mat X(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) X(i, j) = nd(rng);
  return X;
}

template <bool Parallel>
void BM_QuasiTriangularLyapunov(benchmark::State& state) {
  const Index n = state.range(0);
  const Mat A = random_matrix(n, 1) - 3.0 * std::sqrt(double(n)) * Mat::Identity(n, n);
  const RealSchur schur = real_schur(A);
  const Mat F = random_matrix(n, 2);
  const Mat C0 = F + F.transpose();
  for (auto _ : state) {
    Mat C = C0;
    if constexpr (Parallel) kernels::quasi_triangular_lyapunov_omp(schur.S, C);
    else kernels::quasi_triangular_lyapunov_serial(schur.S, C);
    benchmark::DoNotOptimize(C.data());
  }
}

template <bool Parallel>
void BM_EnsembleObserve(benchmark::State& state) {
  const Index n = state.range(0);
  const Mat step = 0.99 * Mat::Identity(n, n) + 1e-3 * random_matrix(n, 3);
  const Mat Y0 = random_matrix(n, 4).leftCols(32);
  const kernels::Advance adv = [&](const Vec& y) -> Vec { return step * y; };
  const kernels::Observe obs = [](const Vec& y) { return y.norm(); };
  for (auto _ : state) {
    Mat out = Parallel ? kernels::ensemble_observe_omp(Y0, 100, adv, obs)
                       : kernels::ensemble_observe_serial(Y0, 100, adv, obs);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_QuasiTriangularLyapunov<false>)->Arg(128)->Arg(356)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuasiTriangularLyapunov<true>)->Arg(128)->Arg(356)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleObserve<false>)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleObserve<true>)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
