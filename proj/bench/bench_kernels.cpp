// Serial reference vs OpenMP kernels, plus one full globe-test replicate.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "surftest/globe.hpp"
#include "surftest/kernels.hpp"
#include "surftest/sim.hpp"

using namespace surftest;

namespace {

std::vector<double> randn(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> v(count);
  for (double& x : v) x = z(rng);
  return v;
}

// args: n, N, M
void gram_args(benchmark::internal::Benchmark* b) {
  b->Args({100, 100, 50})->Args({300, 100, 50})->Args({200, 200, 100});
}

void BM_marginal_gram_serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0)), N = static_cast<std::size_t>(state.range(1)),
             M = static_cast<std::size_t>(state.range(2));
  const auto x = randn(n * N * M, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::marginal_gram(x, n, N, M));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * N * N * M));
}
BENCHMARK(BM_marginal_gram_serial)->Apply(gram_args)->Unit(benchmark::kMillisecond);

void BM_marginal_gram_omp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0)), N = static_cast<std::size_t>(state.range(1)),
             M = static_cast<std::size_t>(state.range(2));
  const auto x = randn(n * N * M, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::marginal_gram(x, n, N, M));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * N * N * M));
}
BENCHMARK(BM_marginal_gram_omp)->Apply(gram_args)->Unit(benchmark::kMillisecond);

void BM_project_s_serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0)), N = static_cast<std::size_t>(state.range(1)),
             M = static_cast<std::size_t>(state.range(2));
  const auto x = randn(n * N * M, 2);
  const auto basis = randn(4 * N, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::project_s(x, n, N, M, basis, 4, 0.01));
}
BENCHMARK(BM_project_s_serial)->Apply(gram_args)->Unit(benchmark::kMillisecond);

void BM_project_s_omp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0)), N = static_cast<std::size_t>(state.range(1)),
             M = static_cast<std::size_t>(state.range(2));
  const auto x = randn(n * N * M, 2);
  const auto basis = randn(4 * N, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::project_s(x, n, N, M, basis, 4, 0.01));
}
BENCHMARK(BM_project_s_omp)->Apply(gram_args)->Unit(benchmark::kMillisecond);

void BM_globe_replicate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  StreamRng rng(9, 0);
  const auto [a, b] = generate_example1(n, n, 0.0, Grid::uniform(0, 1, 100), Grid::uniform(0, 1, 50), rng);
  for (auto _ : state) benchmark::DoNotOptimize(globe_test(a, b).statistic);
}
BENCHMARK(BM_globe_replicate)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
