// Serial reference kernel vs the OpenMP kernel on the same workloads.

#include <benchmark/benchmark.h>

#include "cascade/montecarlo.hpp"

namespace {

cascade::ModelParams default_params(double lambda) {
    cascade::ModelParams m;
    m.lambda = lambda;
    m.p = 0.5;
    m.K = 0.1;
    m.stages = 5;
    return m;
}

cascade::McOptions options(cascade::Execution execution) {
    cascade::McOptions o;
    o.execution = execution;
    return o;
}

void omni_coverage(benchmark::State& state, cascade::Execution execution) {
    const auto params = default_params(0.1);
    const std::vector<double> thetas{0.1, 1.0, 10.0, 100.0};
    const auto n = state.range(0);
    for (auto _ : state) {
        auto result = cascade::estimate_coverage(params, {}, thetas, cascade::Strategy::omni, n, 1, options(execution));
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void best_beam(benchmark::State& state, cascade::Execution execution) {
    const auto params = default_params(1.0);
    const auto beams = cascade::BeamConfig::with_k(4);
    const std::vector<double> thetas{0.1, 1.0, 10.0};
    const auto n = state.range(0);
    for (auto _ : state) {
        auto result =
            cascade::estimate_coverage(params, beams, thetas, cascade::Strategy::best_beam, n, 1, options(execution));
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void interference_moments(benchmark::State& state, cascade::Execution execution) {
    const auto params = default_params(1.0);
    const auto n = state.range(0);
    for (auto _ : state) {
        auto result = cascade::estimate_interference(params, n, 1, options(execution));
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK_CAPTURE(omni_coverage, serial, cascade::Execution::serial)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(omni_coverage, parallel, cascade::Execution::parallel)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(best_beam, serial, cascade::Execution::serial)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(best_beam, parallel, cascade::Execution::parallel)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(interference_moments, serial, cascade::Execution::serial)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(interference_moments, parallel, cascade::Execution::parallel)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
