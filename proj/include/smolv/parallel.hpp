#pragma once

#include <cstddef>
#include <functional>

namespace smolv {

/// Worker count: SMOLV_NUM_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
int thread_count();

/// When set, reductions use a fixed chunk count independent of the thread
/// count, so results are bit-identical for any SMOLV_NUM_THREADS.
void set_deterministic(bool on);
bool deterministic();

/// Number of reduction chunks for a loop of `n` iterations.
std::size_t reduction_chunks(std::size_t n);

/// Runs body(chunk, begin, end) for `chunks` contiguous slices of [0, n).
/// Chunks are distributed over thread_count() workers; the caller merges
/// per-chunk results in chunk order.
void parallel_chunks(std::size_t n, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace smolv
