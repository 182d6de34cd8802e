#include <benchmark/benchmark.h>

#include "siqs/meanfield.hpp"
#include "siqs/spectral.hpp"

namespace {

siqs::ModelParams case_study() {
  siqs::ModelParams p;
  p.lambda = 0.36;
  p.beta = 0.1;
  p.v = 0.821;
  p.p_q = 0.19;
  p.gamma_t = 0.65;
  p.gamma_q = 0.92;
  p.sigma_n = 0.5;
  p.theta = 0.5;
  p.sigma_v = 0.3;
  return p;
}

void BM_AnalyticThreshold(benchmark::State& state) {
  auto p = case_study();
  for (auto _ : state) {
    benchmark::DoNotOptimize(p);
    benchmark::DoNotOptimize(siqs::analytic_threshold(p));
  }
}
BENCHMARK(BM_AnalyticThreshold);

void BM_ThresholdReport(benchmark::State& state) {
  const auto p = case_study();
  for (auto _ : state) benchmark::DoNotOptimize(siqs::threshold_report(p));
}
BENCHMARK(BM_ThresholdReport);

void BM_MacroIntegration(benchmark::State& state) {
  const auto p = case_study();
  const siqs::MacroState y0{0.178, 0.001, 0, 0.82, 0.001, 0};
  for (auto _ : state) benchmark::DoNotOptimize(siqs::integrate_to(y0, p, 200.0, 0.01));
}
BENCHMARK(BM_MacroIntegration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
