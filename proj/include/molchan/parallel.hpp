#pragma once

#include <cstddef>
#include <functional>

namespace molchan {

/// Worker count from MOLCHAN_THREADS; 0 or unset means hardware concurrency.
unsigned worker_count_from_env();

/// Resolves 0 to worker_count_from_env().
unsigned resolve_workers(unsigned requested);

/// Calls task(i) for every i in [0, count) on up to `workers` threads.
/// Tasks must write to disjoint state; the first exception is rethrown.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task);

}  // namespace molchan
