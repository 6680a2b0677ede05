#include <benchmark/benchmark.h>

#include <random>

#include "thetalab/lattice.hpp"

using namespace thetalab::lattice;

static void BM_SmithNormalForm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> entry(-50, 50);
  IntMatrix K(n);
  do {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) K(i, j) = entry(rng);
  } while (K.determinant() == 0);
  for (auto _ : state) benchmark::DoNotOptimize(smith_normal_form(K));
}
BENCHMARK(BM_SmithNormalForm)->DenseRange(2, 8, 2);

static void BM_FiberEnumerate(benchmark::State& state) {
  const auto level = LevelStructure::scalar(state.range(1), 1);
  const auto G = level.base_group();
  const std::vector<GroupElement> d(static_cast<std::size_t>(state.range(0)), G.zero());
  for (auto _ : state) benchmark::DoNotOptimize(fiber_enumerate(d, state.range(0), level));
}
BENCHMARK(BM_FiberEnumerate)->Args({2, 3})->Args({3, 2})->Args({4, 1});

static void BM_KernelBruteForce(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(krn_count_brute_force(2, 2, 1));
}
BENCHMARK(BM_KernelBruteForce);

BENCHMARK_MAIN();
