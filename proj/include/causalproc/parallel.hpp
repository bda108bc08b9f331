#pragma once

#include <cstddef>
#include <functional>

namespace causalproc {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Indices are handed
/// out in fixed contiguous blocks, so any per-index results are independent
/// of the thread count. The first exception thrown is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Thread count from CAUSALPROC_THREADS, or 1.
int default_thread_count();

}  // namespace causalproc
