#include <benchmark/benchmark.h>

#include "evolve/flow.hpp"

static evolve::Leaf window(double lo, double hi) {
  evolve::Leaf leaf;
  leaf.kind = evolve::LeafKind::remodeling_interval;
  leaf.t_lo = lo;
  leaf.t_hi = hi;
  return leaf;
}

static void BM_IntegrateProcess(benchmark::State& state) {
  const auto model = evolve::zoo::exp_decay();
  const double step = 3.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evolve::integrate_process(model, window(0, 3), 0.0, {}, step));
}
BENCHMARK(BM_IntegrateProcess)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_Cocycle(benchmark::State& state) {
  const auto model = evolve::zoo::exp_decay();
  for (auto _ : state) benchmark::DoNotOptimize(evolve::cocycle_check(model, window(0, 3), {}, 0.015));
}
BENCHMARK(BM_Cocycle)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
