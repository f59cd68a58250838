#pragma once

#include <cstddef>
#include <functional>

namespace memheat {

/// Worker count used by data-parallel loops; defaults to 1.
int thread_count();
void set_thread_count(int n);

/// Calls body(i) for i in [0, n). Each index is handled exactly once and
/// results must be written to per-index slots, so output does not depend on
/// the number of threads. The exception from the lowest failing index is
/// rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace memheat
