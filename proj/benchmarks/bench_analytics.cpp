#include <benchmark/benchmark.h>

#include "aoi/aoi.hpp"

namespace {

aoi::ModelParams mixture_model(double theta) {
  return {0.8, aoi::Threshold(theta), aoi::ServiceDistribution::mixture_det_exp(0.5, 1.0, 1.0)};
}

void BM_MeanAoi(benchmark::State& state) {
  const auto m = mixture_model(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(aoi::mean_aoi(m));
}
BENCHMARK(BM_MeanAoi);

void BM_Phi(benchmark::State& state) {
  const auto a = aoi::analyze(mixture_model(0.5));
  double s = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(a.phi(aoi::Complex(s, 1.0)));
    s = s < 10.0 ? s + 0.01 : 0.1;
  }
}
BENCHMARK(BM_Phi);

void BM_Ccdf(benchmark::State& state) {
  const auto m = state.range(0) == 0
                     ? aoi::ModelParams(0.8, aoi::Threshold(0.5), aoi::ServiceDistribution::exponential(1.0))
                     : mixture_model(0.5);
  const auto a = aoi::analyze(m);
  for (auto _ : state) benchmark::DoNotOptimize(aoi::ccdf(a, 3.0));
}
BENCHMARK(BM_Ccdf)->Arg(0)->Arg(1)->ArgNames({"atoms"})->Unit(benchmark::kMicrosecond);

void BM_Sweep(benchmark::State& state) {
  const aoi::BaseModel base{0.8, aoi::ServiceDistribution::mixture_det_exp(0.5, 1.0, 1.0)};
  const auto grid = aoi::default_theta_grid(base.service);
  for (auto _ : state) benchmark::DoNotOptimize(aoi::sweep(base, grid));
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  aoi::SimConfig cfg{.model = mixture_model(0.5)};
  cfg.horizon_events = state.range(0);
  cfg.replications = 1;
  for (auto _ : state) benchmark::DoNotOptimize(aoi::simulate(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
