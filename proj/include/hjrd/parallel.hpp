#pragma once

#include <cstddef>
#include <functional>

namespace hjrd {

// Number of workers the pool will use: hardware concurrency, capped by the
// HJRD_THREADS environment variable when set. Always >= 1.
std::size_t worker_count();

// Fork-join loop over [0, n). The body receives a contiguous [begin, end)
// chunk and is invoked at most `workers` times concurrently. Chunking is a
// pure function of (n, workers), never of timing, and every index is owned by
// exactly one chunk, so writes at index i are race-free and results are
// bitwise reproducible across runs and worker counts.
//
// workers == 0 means worker_count(). Small loops run inline on the caller.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t workers = 0);

}  // namespace hjrd
