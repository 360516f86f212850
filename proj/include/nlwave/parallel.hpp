#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace nlwave {

/// `requested` (or hardware concurrency when 0), capped by NLWAVE_THREADS; at least 1.
inline int worker_count(int requested = 0) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NLWAVE_THREADS"); env != nullptr && *env != '\0') {
    const int cap = std::atoi(env);
    if (cap > 0) n = n > 0 ? std::min(n, cap) : cap;
  }
  return std::max(1, n);
}

/// Calls body(i) for i in [0, count) on up to `threads` workers. body must only
/// write to slots owned by i; exceptions must be caught inside body.
template <typename Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  const int workers = std::min<int>(worker_count(threads), static_cast<int>(std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace nlwave
