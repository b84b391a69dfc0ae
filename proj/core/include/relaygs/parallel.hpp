#pragma once

#include <cstddef>
#include <functional>

namespace relaygs {

// Number of worker threads for render/deform loops. Resolution order:
// set_thread_count() > RELAYGS_THREADS env var > hardware concurrency
// (capped at 8). A value of 1 disables threading entirely.
int thread_count();
void set_thread_count(int n);

// Splits [0, n) into one contiguous chunk per worker and runs
// fn(worker, begin, end). Chunk boundaries depend only on n and the thread
// count, so per-worker partial results can be merged in worker order for
// bit-reproducible reductions.
void parallel_for_chunks(size_t n, const std::function<void(int worker, size_t begin, size_t end)>& fn);

}  // namespace relaygs
