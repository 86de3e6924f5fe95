#include <benchmark/benchmark.h>

#include <vector>

#include "tempis/diagnostics.hpp"
#include "tempis/estimators.hpp"
#include "tempis/sampler.hpp"

using namespace tempis;

static void BM_AsymptoticVariance(benchmark::State& state) {
  auto g = Target::gaussian();
  Trial q(g, Tempered{0.4});
  auto f = TestFunction::power(4);
  for (auto _ : state) benchmark::DoNotOptimize(asymptotic_variance(q, g, f));
}
BENCHMARK(BM_AsymptoticVariance);

static void BM_WorstCaseRisk(benchmark::State& state) {
  std::vector<double> pi{0.3, 0.25, 0.2, 0.15, 0.1}, q{0.2, 0.2, 0.2, 0.2, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(worst_case_risk_finite(pi, q).risk);
}
BENCHMARK(BM_WorstCaseRisk);

static void BM_JumpChain(benchmark::State& state) {
  RwmhKernel k(Target::student_t(4), 0.55, 3.0);
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_jump_chain(k, 0.0, n, rng).back());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_JumpChain)->Arg(1000)->Arg(100000);

static void BM_SnisBeta(benchmark::State& state) {
  RwmhKernel k(Target::gaussian(), 0.7, 2.0);
  Rng rng(2);
  auto chain = simulate_jump_chain(k, 0.0, 10000, rng);
  auto f = TestFunction::power(2);
  for (auto _ : state) benchmark::DoNotOptimize(snis_beta(chain, k.target(), 0.7, f).value);
}
BENCHMARK(BM_SnisBeta);

static void BM_GeneratorApply(benchmark::State& state) {
  RwmhKernel k(Target::poly_tail(5), 0.55, 1.0, true);
  auto v = DriftFunction::bounded_polynomial(1.0, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(generator_apply(k, v, 4.0));
}
BENCHMARK(BM_GeneratorApply);
BENCHMARK_MAIN();
