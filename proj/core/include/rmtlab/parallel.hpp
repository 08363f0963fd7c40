#pragma once

#include <cstddef>
#include <functional>

namespace rmtlab {

/// Runs body(i) for i in [0, count) on `threads` workers pulling indices from a shared counter.
/// With more than one worker, BLAS is switched to a single thread for the duration. The first
/// exception thrown by a body is rethrown after all workers have stopped.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

/// std::thread::hardware_concurrency with a floor of 1.
unsigned default_threads();

}  // namespace rmtlab
