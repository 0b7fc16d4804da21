#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace tghp {

// Worker count for replication fan-out, overridable via TGHP_THREADS.
// Work is partitioned by index so results do not depend on the count.
inline int thread_count() {
  if (const char* env = std::getenv("TGHP_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

inline void parallel_for(long n, const std::function<void(long)>& body) {
  const int workers = thread_count();
  if (workers <= 1 || n < 2) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w]() {
      for (long i = w; i < n; i += workers) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace tghp
