#include "hjrd/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hjrd {

namespace {

std::size_t detect_workers() {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("HJRD_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return n;
}

// Below this many items the spawn cost dominates; run inline.
constexpr std::size_t kInlineThreshold = 4096;

}  // namespace

std::size_t worker_count() {
  static const std::size_t n = detect_workers();
  return n;
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t workers) {
  if (n == 0) return;
  if (workers == 0) workers = worker_count();
  workers = std::min(workers, (n + kInlineThreshold - 1) / kInlineThreshold);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(0, std::min(n, chunk));
  for (auto& t : pool) t.join();
}

}  // namespace hjrd
