#include <benchmark/benchmark.h>

#include <cmath>

#include "thetalab/siegel.hpp"
#include "thetalab/theta.hpp"

using namespace thetalab;

static void BM_ThetaGenus(benchmark::State& state) {
  const auto g = static_cast<std::size_t>(state.range(0));
  const SiegelMatrix W = SiegelMatrix::random(g, 1);
  EvalRequest req{{RealVector(g, 0.25), RealVector(g, 0.1)}, ComplexVector(g, Complex(0.3, 0.2)), W, 1e-14};
  for (auto _ : state) benchmark::DoNotOptimize(theta(req));
  state.counters["points"] = static_cast<double>(plan_truncation(req).points);
}
BENCHMARK(BM_ThetaGenus)->DenseRange(1, 4);

static void BM_ThetaEpsilon(benchmark::State& state) {
  const SiegelMatrix W = SiegelMatrix::random(2, 3);
  const double eps = std::pow(10.0, -static_cast<double>(state.range(0)));
  EvalRequest req{{{0.0, 0.0}, {0.0, 0.0}}, {Complex(0.1, 0.4), Complex(-0.2, 0.3)}, W, eps};
  for (auto _ : state) benchmark::DoNotOptimize(theta(req));
}
BENCHMARK(BM_ThetaEpsilon)->Arg(4)->Arg(8)->Arg(12)->Arg(15);

static void BM_ThetaExtended(benchmark::State& state) {
  const SiegelMatrix W = SiegelMatrix::random(2, 3);
  EvalRequest req{{{0.0, 0.0}, {0.0, 0.0}}, {Complex(0.1, 0.4), Complex(-0.2, 0.3)}, W, 1e-15, Precision::Extended};
  for (auto _ : state) benchmark::DoNotOptimize(theta(req));
}
BENCHMARK(BM_ThetaExtended);

static void BM_ThetaJet(benchmark::State& state) {
  const SiegelMatrix W = SiegelMatrix::random(2, 5);
  EvalRequest req{{{0.2, 0.1}, {0.0, 0.3}}, {Complex(0.1, 0.4), Complex(-0.2, 0.3)}, W, 1e-14};
  for (auto _ : state) benchmark::DoNotOptimize(theta_jet(req));
}
BENCHMARK(BM_ThetaJet);

BENCHMARK_MAIN();
