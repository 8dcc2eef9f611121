#include <benchmark/benchmark.h>

#include "evolve/expr/expr.hpp"

namespace expr = evolve::expr;

static void BM_Parse(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(expr::parse("(1 + t) * (dot(F * e, F * e) + c) + log(det(F)) * sin(t)^2",
                                         expr::declarations_for({{"e", evolve::Vec3(0, 0, 1)}, {"c", 0.25}})));
  }
}
BENCHMARK(BM_Parse);

static void BM_Eval(benchmark::State& state) {
  const expr::Constants constants{{"e", evolve::Vec3(0, 0, 1)}, {"c", 0.25}};
  const auto e = expr::parse("(1 + t) * (dot(F * e, F * e) + c) + log(det(F)) * sin(t)^2",
                             expr::declarations_for(constants));
  evolve::Mat3 F;
  F << 1.2, 0.1, 0.0, 0.0, 0.9, 0.2, 0.1, 0.0, 1.1;
  for (auto _ : state) benchmark::DoNotOptimize(expr::eval(e, 0.3, F, constants));
}
BENCHMARK(BM_Eval);

static void BM_EvalDual(benchmark::State& state) {
  const expr::Constants constants{{"e", evolve::Vec3(0, 0, 1)}, {"c", 0.25}};
  const auto e = expr::parse("(1 + t) * (dot(F * e, F * e) + c) + log(det(F)) * sin(t)^2",
                             expr::declarations_for(constants));
  evolve::Mat3 F;
  F << 1.2, 0.1, 0.0, 0.0, 0.9, 0.2, 0.1, 0.0, 1.1;
  const evolve::Mat3 dF = evolve::elementary(0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(expr::eval_dual(e, 0.3, F, 1.0, dF, constants));
}
BENCHMARK(BM_EvalDual);

BENCHMARK_MAIN();
