#pragma once

#include <cstddef>
#include <functional>

namespace kroots {

/// Worker count: KERNEL_ROOTS_THREADS if set to a positive integer, else
/// the hardware concurrency (at least 1).
int worker_count();

/// Runs fn(i) for i in [0, count) on up to worker_count() threads. Callers
/// write results into per-index slots and reduce in index order, so the
/// outcome does not depend on the number of workers. The first exception
/// thrown by any task is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace kroots
