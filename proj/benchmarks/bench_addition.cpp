#include <benchmark/benchmark.h>

#include "thetalab/addition.hpp"

using namespace thetalab;
using namespace thetalab::addition;

static void BM_Verify(benchmark::State& state) {
  AdditionInstance inst;
  inst.N = state.range(0);
  inst.level = lattice::LevelStructure::scalar(state.range(1), 1);
  inst.omega = SiegelMatrix::scalar({0.0, 1.0}, 1);
  inst.d = Tuple(static_cast<std::size_t>(inst.N), inst.level.base_group().zero());
  inst.samples = sample_points(inst.N, inst.omega, 20, 7);
  for (auto _ : state) benchmark::DoNotOptimize(verify(inst));
}
BENCHMARK(BM_Verify)->Args({2, 1})->Args({2, 3})->Args({3, 1})->Args({3, 2});

BENCHMARK_MAIN();
