#include <benchmark/benchmark.h>

// libbenchmark_main ships LTO objects from another compiler build; use our own main.
BENCHMARK_MAIN();
