#include <benchmark/benchmark.h>

#include "trapsim/conditional.hpp"
#include "trapsim/sausage.hpp"
#include "trapsim/trapfield.hpp"

using namespace trapsim;

namespace {

const SimParams kParams = SimParams::make(1.0, 0.1, 1.0, 1024);

// range(0): 0 reference, 1 serial kernel, 2 OpenMP kernel
const char* label(std::int64_t v)
{
    return v == 0 ? "reference" : v == 1 ? "serial" : "openmp";
}

void BM_direct(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(1));
    for (auto _ : state)
    {
        Estimate e;
        if (state.range(0) == 0)
            e = reference::direct_survival_estimate(kParams, n, StreamKey(1), SubgridMode::bridge);
        else
            e = direct_survival_estimate(kParams, n, StreamKey(1), SubgridMode::bridge,
                                         state.range(0) == 1 ? Exec::serial : Exec::parallel);
        benchmark::DoNotOptimize(e.value);
    }
    state.SetLabel(label(state.range(0)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_annealed(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(1));
    const AnnealedOptions opts{SubgridMode::bridge, false};
    for (auto _ : state)
    {
        AnnealedResult r;
        if (state.range(0) == 0)
            r = reference::annealed_survival_estimate(kParams, n, 64, StreamKey(2), opts);
        else
            r = annealed_survival_estimate(kParams, n, 64, StreamKey(2), opts,
                                           state.range(0) == 1 ? Exec::serial : Exec::parallel);
        benchmark::DoNotOptimize(r.estimate.value);
    }
    state.SetLabel(label(state.range(0)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * 64);
}

void BM_conditional(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(1));
    const ConditionalOptions opts{SubgridMode::bridge, 20, 20};
    for (auto _ : state)
    {
        const ConditionalSummary s = conditional_statistics(
            kParams, n, 32, EventParamsA{}, EventParamsB{}, StreamKey(3), opts,
            state.range(0) == 1 ? Exec::serial : Exec::parallel);
        benchmark::DoNotOptimize(s.median_diff);
    }
    state.SetLabel(label(state.range(0)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * 32);
}

} // namespace

BENCHMARK(BM_direct)->ArgsProduct({{0, 1, 2}, {2000}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_annealed)->ArgsProduct({{0, 1, 2}, {100}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_conditional)->ArgsProduct({{1, 2}, {200}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
