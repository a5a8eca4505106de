#pragma once

#include <cstddef>
#include <functional>

namespace monolab {

/// Worker count: MONODROMY_LAB_THREADS if set (>= 1), else the hardware
/// concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. The first
/// exception thrown by any task is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace monolab
