#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ganchain {

inline int default_workers() {
  if (const char* env = std::getenv("GANCHAIN_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

// Runs fn(0..n-1) on up to `workers` threads. Jobs must be independent;
// results must not depend on scheduling. Exceptions are rethrown (first one
// wins).
inline void parallel_for(int64_t n, int workers, const std::function<void(int64_t)>& fn) {
  if (workers <= 0) workers = default_workers();
  if (workers == 1 || n <= 1) {
    for (int64_t i = 0; i < n; i++) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto body = [&] {
    for (;;) {
      const int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int k = int(std::min<int64_t>(workers, n));
  pool.reserve(size_t(k));
  for (int i = 0; i < k; i++) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace ganchain
