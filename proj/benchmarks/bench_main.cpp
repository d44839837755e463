#include <benchmark/benchmark.h>

#include <random>

#include "delayflock/experiments.hpp"

namespace {

using namespace delayflock;

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (double& e : m.values()) e = u(rng);
  return m;
}

ModelParams params(std::size_t n) {
  ModelParams p;
  p.n = n;
  p.d = 2;
  p.lambda = 1.0;
  p.potential = Potential::cucker_smale(2.0);
  return p;
}

void BM_VelocityField(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const ModelParams p = params(n);
  const Matrix v = random_matrix(rng, n, 2), xd = random_matrix(rng, n, 2), vd = random_matrix(rng, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(velocity_field(p, v, xd, vd));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_VelocityField)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void BM_Fiedler(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  const Matrix l = laplacian(params(n), random_matrix(rng, n, 2));
  for (auto _ : state) benchmark::DoNotOptimize(fiedler(l));
}
BENCHMARK(BM_Fiedler)->RangeMultiplier(2)->Range(4, 32);

void BM_PsiStar(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  const Matrix a = augment_diagonal(weight_matrix(params(n), random_matrix(rng, n, 2)));
  for (auto _ : state) benchmark::DoNotOptimize(psi_star_empirical(a));
}
BENCHMARK(BM_PsiStar)->RangeMultiplier(2)->Range(4, 16);

// 1000 RK4 steps from a fresh seed per iteration.
void BM_Steps(benchmark::State& state) {
  const Scenario s = section4_scenario(1.0, 100.0);
  for (auto _ : state) {
    state.PauseTiming();
    HistoryBuffer buffer = init_history(s);
    state.ResumeTiming();
    for (int k = 0; k < 1000; ++k) benchmark::DoNotOptimize(step(buffer, s));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Steps);

void BM_SectionFourRun(benchmark::State& state) {
  const Scenario s = section4_scenario(static_cast<double>(state.range(0)), 50.0);
  for (auto _ : state) benchmark::DoNotOptimize(run(s));
}
BENCHMARK(BM_SectionFourRun)->Arg(0)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
