#pragma once

#include <cstddef>
#include <functional>

namespace c3vg {

// Worker cap: CURVE3DVG_THREADS if set, else hardware concurrency.
int worker_count();

// Runs fn(begin, end) over contiguous chunks of [0, n). Chunk boundaries
// depend only on n and the worker cap, never on scheduling, so callers can
// reduce per-chunk results in chunk order and stay deterministic.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn);

// Number of chunks parallel_chunks will use for n items, for pre-sizing
// per-chunk accumulators.
int chunk_count(std::size_t n);

// As parallel_chunks, but fn also receives the chunk index in [0, chunk_count(n)).
void parallel_indexed_chunks(
    std::size_t n, const std::function<void(int, std::size_t, std::size_t)>& fn);

}  // namespace c3vg
