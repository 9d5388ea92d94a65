#include <benchmark/benchmark.h>

#include "lcurve/gam.hpp"
#include "lcurve/planner.hpp"
#include "lcurve/simulate.hpp"

using namespace lcurve;

namespace {

Execution policy_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

const std::vector<MetricObservation>& acc_grid() {
  static const auto data = [] {
    auto c = GridConfig::per_size(42);
    std::erase_if(c.generators, [](const MetricGenerator& g) { return g.metric_kind != MetricKind::ACC; });
    return simulate_grid(c);
  }();
  return data;
}

void BM_SimulateGrid(benchmark::State& state) {
  const auto config = GridConfig::log_linear(1);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_grid(config, policy_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.observation_count()));
}

void BM_LambdaSearch(benchmark::State& state) {
  const auto spec = ModelSpec::standard(MetricKind::ACC);
  for (auto _ : state) benchmark::DoNotOptimize(fit(spec, acc_grid(), policy_of(state)));
}

void BM_GamPlannerScan(benchmark::State& state) {
  auto spec = ModelSpec::standard(MetricKind::ACC);
  spec.fixed_lambdas = std::vector<double>{1.0};
  const auto model = fit(spec, acc_grid());
  const Cell cell = Cell::of("deep", "AU", "dnsNet161", 1);
  const PlanQuery query{MetricKind::ACC, 0.95, 100000};
  for (auto _ : state) benchmark::DoNotOptimize(gam_required_sample_size(model, cell, query, policy_of(state)));
}

}  // namespace

BENCHMARK(BM_SimulateGrid)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LambdaSearch)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GamPlannerScan)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
