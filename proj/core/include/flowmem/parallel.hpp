#pragma once

#include <cstddef>
#include <functional>

namespace flowmem {

/// Upper bound on worker threads used by parallel stages. 0 selects
/// std::thread::hardware_concurrency(). Results never depend on this value.
void set_max_threads(unsigned count) noexcept;
unsigned max_threads() noexcept;

/// Runs body(i) for i in [0, count). Each index is processed exactly once by
/// one thread; callers write into pre-sized slots so output order is fixed.
/// If bodies throw, the exception from the lowest failing index is rethrown
/// after all workers join, matching sequential evaluation.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace flowmem
