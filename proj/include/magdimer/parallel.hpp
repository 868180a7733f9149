#pragma once

#include <cstddef>
#include <functional>

namespace magdimer {

/// Worker count: MAGDIMER_THREADS when set (>= 1), else the hardware concurrency.
unsigned worker_count();

/// Calls fn(i) for i in [0, n) across worker_count() threads. Callers write
/// results by index, so output order never depends on scheduling. The first
/// exception thrown by any task is rethrown after all workers join. Calls made
/// from inside a task run serially on that task's thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace magdimer
