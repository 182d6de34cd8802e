#include <benchmark/benchmark.h>

#include <memory>

#include "siqs/engine.hpp"
#include "siqs/netgen.hpp"

namespace {

siqs::ModelParams bench_params(std::int64_t n) {
  siqs::ModelParams p;
  p.n = n;
  p.v = 0.8;
  p.theta = 0.5;
  p.sigma_v = 0.7;
  p.sigma_n = 0.2;
  return p;
}

void BM_StepComplete(benchmark::State& state) {
  const auto p = bench_params(state.range(0));
  auto engine = siqs::Engine::init(p, nullptr, p.n / 10, 1);
  for (auto _ : state) benchmark::DoNotOptimize(engine.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepComplete)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_StepErdosRenyi(benchmark::State& state) {
  const auto p = bench_params(10000);
  auto backbone = std::make_shared<const siqs::Backbone>(siqs::Backbone::erdos_renyi(p.n, 0.01, 1));
  auto engine = siqs::Engine::init(p, backbone, p.n / 10, 1);
  for (auto _ : state) benchmark::DoNotOptimize(engine.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepErdosRenyi);

void BM_RunHorizon(benchmark::State& state) {
  const auto p = bench_params(10000);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto engine = siqs::Engine::init(p, nullptr, 100, ++seed);
    benchmark::DoNotOptimize(engine.run_until(50.0));
  }
}
BENCHMARK(BM_RunHorizon)->Unit(benchmark::kMillisecond);

void BM_ErdosRenyiBuild(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(siqs::Backbone::erdos_renyi(10000, 0.01, 3).edge_count());
}
BENCHMARK(BM_ErdosRenyiBuild)->Unit(benchmark::kMillisecond);

}  // namespace
