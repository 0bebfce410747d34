#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace mango {

/// Worker count from the MANGO_WORKERS environment variable, falling back
/// to the hardware concurrency (at least 1).
int default_worker_count();

/// Runs fn(i) for every i in [0, n) on up to `workers` threads and collects
/// results by index, so the output is independent of scheduling. fn must not
/// throw; per-item failures belong in R.
template <typename R>
std::vector<R> parallel_map(std::size_t n, int workers,
                            const std::function<R(std::size_t)>& fn) {
  std::vector<R> results(n);
  if (n == 0) return results;
  const int thread_count =
      std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (thread_count == 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(thread_count));
  for (int t = 0; t < thread_count; ++t) {
    threads.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        results[i] = fn(i);
      }
    });
  }
  for (std::thread& th : threads) th.join();
  return results;
}

}  // namespace mango
