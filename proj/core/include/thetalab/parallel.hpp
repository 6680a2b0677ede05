#pragma once

#include <cstddef>
#include <functional>

namespace thetalab {

/// Worker count: THETA_LAB_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Calls fn(i) for i in [0, n), split into contiguous blocks across
/// thread_count() workers. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace thetalab
