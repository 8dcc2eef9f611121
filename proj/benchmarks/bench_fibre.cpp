#include <benchmark/benchmark.h>

#include "evolve/evolution.hpp"
#include "evolve/foliation.hpp"
#include "evolve/model.hpp"

namespace zoo = evolve::zoo;

static void BM_AssembleSystem(benchmark::State& state) {
  const auto model = zoo::liquid_crystal({});
  const auto frames = evolve::sample_frames(static_cast<int>(state.range(0)), 42);
  for (auto _ : state) benchmark::DoNotOptimize(evolve::assemble_system(model, 0.5, frames));
}
BENCHMARK(BM_AssembleSystem)->Arg(20)->Arg(80)->Arg(320);

static void BM_Fibre(benchmark::State& state) {
  const auto model = state.range(0) == 0 ? zoo::isotropic() : zoo::liquid_crystal({});
  for (auto _ : state) benchmark::DoNotOptimize(evolve::evolution_fibre(model, 0.5));
}
BENCHMARK(BM_Fibre)->Arg(0)->Arg(1);

static void BM_Classify(benchmark::State& state) {
  const auto model = zoo::liquid_crystal({});
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        evolve::classify_interval(model, 0.0, 10.0, static_cast<int>(state.range(0)), {}, threads));
  }
}
BENCHMARK(BM_Classify)->Args({101, 1})->Args({1001, 1})->Args({1001, 0})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
