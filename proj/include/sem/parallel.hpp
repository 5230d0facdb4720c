#pragma once

#include <cstddef>
#include <functional>

namespace sem {

/// Worker cap from SEM_THREADS, else the hardware concurrency (at least 1).
int worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Callers
/// write results by index, so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sem
