#pragma once

#include <cstddef>
#include <functional>

namespace evolve {

/// Worker count: EVOLVE_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default).
/// Indices are claimed dynamically; the first exception thrown by any body
/// is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

}  // namespace evolve
