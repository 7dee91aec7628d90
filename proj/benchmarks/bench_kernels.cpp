// Microbenchmarks for the numeric kernels on the solver's hot path.  Run the
// lrmc_bench binary directly; google-benchmark picks sensible iteration
// counts on its own.
#include <benchmark/benchmark.h>

#include <cstdint>

#include "lrmc/admm.hpp"
#include "lrmc/likelihood.hpp"
#include "lrmc/markov.hpp"
#include "lrmc/rng.hpp"
#include "lrmc/spectral.hpp"
#include "lrmc/types.hpp"

namespace {

using namespace lrmc;

Matrix random_square(Index p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) m(i, j) = 2.0 * uniform01(rng) - 1.0;
  return m;
}

LikelihoodData sample_data(Index p, std::uint64_t seed) {
  TransitionMatrix P = generate_latent_lowrank(p, 3, seed);
  Trajectory traj =
      simulate(P, 40 * static_cast<std::int64_t>(p) * p, TrajectoryMode::chain, seed);
  return LikelihoodData(count_transitions(traj));
}

void BM_SvdTruncate(benchmark::State& state) {
  const Index p = state.range(0);
  const Matrix M = random_square(p, 11);
  for (auto _ : state) benchmark::DoNotOptimize(svd_truncate(M, 3));
}
BENCHMARK(BM_SvdTruncate)->Arg(20)->Arg(50)->Arg(100);

void BM_SpectralBallProject(benchmark::State& state) {
  const Index p = state.range(0);
  const Matrix M = random_square(p, 13);
  for (auto _ : state) benchmark::DoNotOptimize(project_spectral_ball(M, 0.5));
}
BENCHMARK(BM_SpectralBallProject)->Arg(20)->Arg(50)->Arg(100);

void BM_KyFanSubgradient(benchmark::State& state) {
  const Matrix M = random_square(50, 17);
  for (auto _ : state) benchmark::DoNotOptimize(kyfan_subgradient(M, 3));
}
BENCHMARK(BM_KyFanSubgradient);

void BM_SimplexProjectRows(benchmark::State& state) {
  const Matrix M = random_square(50, 19).array() + 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(simplex_project_rows(M));
}
BENCHMARK(BM_SimplexProjectRows);

// Entrywise prox of the conjugate log term, the inner loop of the Xi block.
void BM_ProxConjugateEntry(benchmark::State& state) {
  for (auto _ : state) {
    double acc = 0.0;
    for (int i = 0; i < 2500; ++i) {
      const double g = -2.0 + 4.0 * (i % 50) / 50.0;
      acc += prox_conjugate_entry(g, 0.02, 1.5);
    }
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 2500);
}
BENCHMARK(BM_ProxConjugateEntry);

void BM_NegLoglik(benchmark::State& state) {
  const LikelihoodData data = sample_data(50, 23);
  const Matrix Q = Matrix::Constant(50, 50, 1.0 / 50.0);
  for (auto _ : state) benchmark::DoNotOptimize(neg_loglik(data, Q));
}
BENCHMARK(BM_NegLoglik);

// One cold solve of the convex subproblem at working tolerance; tracks the
// end-to-end cost of an outer iteration rather than any single block.
void BM_SubproblemSolve(benchmark::State& state) {
  const Index p = state.range(0);
  const LikelihoodData data = sample_data(p, 29);
  SubproblemSpec spec{data, -0.5 * kyfan_subgradient(random_square(p, 31), 3),
                      0.5, 1e-3};
  AdmmOptions opts;
  opts.tol = 1e-6;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_subproblem(spec, std::nullopt, opts));
}
BENCHMARK(BM_SubproblemSolve)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
