#include <benchmark/benchmark.h>

#include "flowmem/synth.hpp"

namespace {

void bm_fgn_davies_harte(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(flowmem::fgn(0.7, n, 1));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_fgn_davies_harte)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity();

// quadratic; kept small
void bm_fgn_hosking(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(flowmem::fgn_hosking(0.7, n, 1));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_fgn_hosking)->RangeMultiplier(2)->Range(1 << 9, 1 << 12)->Complexity();

}  // namespace
