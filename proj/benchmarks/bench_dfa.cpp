#include <benchmark/benchmark.h>

#include "flowmem/dfa.hpp"
#include "flowmem/parallel.hpp"
#include "flowmem/rolling.hpp"
#include "flowmem/surrogate.hpp"
#include "flowmem/synth.hpp"

namespace {

void bm_dfa_hurst(benchmark::State& state) {
    const auto x = flowmem::fgn(0.7, static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(flowmem::dfa_hurst(x));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_dfa_hurst)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

void bm_rolling(benchmark::State& state) {
    flowmem::set_max_threads(static_cast<unsigned>(state.range(0)));
    const auto x = flowmem::fgn(0.7, 2500, 2);
    const auto cal = flowmem::business_day_calendar("2015-01-02", 2500);
    for (auto _ : state) benchmark::DoNotOptimize(flowmem::rolling_hurst(x, cal));
    flowmem::set_max_threads(0);
}
BENCHMARK(bm_rolling)->Arg(1)->Arg(4);

void bm_surrogate_band(benchmark::State& state) {
    const auto x = flowmem::fgn(0.7, 2500, 3);
    const flowmem::SurrogateSpec spec{static_cast<flowmem::SurrogateKind>(state.range(0)), 7, 50};
    for (auto _ : state) benchmark::DoNotOptimize(flowmem::surrogate_band(x, spec));
}
BENCHMARK(bm_surrogate_band)->Arg(0)->Arg(1);

}  // namespace
