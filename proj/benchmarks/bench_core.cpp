#include <cmath>

#include <benchmark/benchmark.h>

#include "liees/liees.hpp"

using namespace liees;

static void BM_Signature(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const auto d = dither_family(DitherKind::third1222, 1, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(compute_signature(d, depth, 8192));
}
BENCHMARK(BM_Signature)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_LogSignature(benchmark::State& state) {
  const auto sig = compute_signature(dither_family(DitherKind::triple123, 1, 1e-3), 4, 8192);
  for (auto _ : state) benchmark::DoNotOptimize(log_signature(sig));
}
BENCHMARK(BM_LogSignature)->Unit(benchmark::kMicrosecond);

static void BM_BracketJet(benchmark::State& state) {
  const auto J = make_power_cost(1, 1, 4);
  const auto fam = make_quadruple_family(Shape::constant(1), Shape::constant(1), {0, 20});
  const std::vector<Shape> s(fam.begin(), fam.end());
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iterated_bracket(J, s, {1, 2, 3, 4}, x));
    x += 1e-9;
  }
}
BENCHMARK(BM_BracketJet);

static void BM_IntegratePeriods(benchmark::State& state) {
  const auto J = make_power_cost(1, 1, 4);
  const auto sys = build_fourth_order_we(J, 1e-4, 1);
  IntegratorConfig c;
  c.steps_per_period = static_cast<int>(state.range(0));
  c.total_time = 100 * 1e-4;
  c.decimation = 64;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(sys, 0.0, c));
  state.SetItemsProcessed(state.iterations() * 100 * state.range(0));
}
BENCHMARK(BM_IntegratePeriods)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_FitRate(benchmark::State& state) {
  Envelope env;
  for (int k = 0; k < static_cast<int>(state.range(0)); ++k) {
    env.times.push_back(1e-3 * k);
    env.distances.push_back(std::pow(1 + 8e-3 * k, -0.5));
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_rate(env));
}
BENCHMARK(BM_FitRate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
