#pragma once

#include <cstddef>
#include <functional>

namespace hyperlab {

/// Worker count: HYPERLAB_THREADS when set to a positive integer, otherwise the hardware
/// concurrency (at least 1).
unsigned thread_count();

/// Calls fn(i) for i in [0, n) on up to thread_count() threads. Indices are handed out
/// dynamically; callers write results into per-index slots so the outcome does not depend on
/// scheduling. The first exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hyperlab
