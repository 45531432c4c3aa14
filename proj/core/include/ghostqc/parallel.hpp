#pragma once

#include <cstddef>
#include <functional>

namespace ghostqc {

// Runs fn(i) for i in [0, count) on up to num_threads workers. Each index owns
// its own output slot, so results are identical for any worker count.
// num_threads <= 1 runs inline.
void parallel_for(std::size_t count, int num_threads,
                  const std::function<void(std::size_t)>& fn);

// Resolves a thread-count request: n > 0 is taken as-is, n == 0 means the
// GHOSTQC_THREADS environment variable if set, else hardware concurrency.
int resolve_threads(int requested);

}  // namespace ghostqc
