#pragma once

#include <cstddef>
#include <functional>

namespace adaptdiff {

// Worker count: min(ADAPTDIFF_THREADS, hardware concurrency), at least 1.
int worker_count();

// Runs fn(i) for i in [0,n). Work is split into static contiguous chunks so
// that results written to per-index slots are identical for any thread count.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace adaptdiff
