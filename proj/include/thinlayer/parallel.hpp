#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace thinlayer {

// Runs fn(i) for i in [0, count) on a small worker pool. Results must be written to
// per-index slots by the caller, which keeps the output order-independent.
template <class F>
void parallel_for(size_t count, F&& fn, unsigned workers = 0) {
  if (workers == 0) workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  workers = unsigned(std::min<size_t>(workers, std::max<size_t>(count, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errs(count);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          errs[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  // lowest failing index wins, independent of scheduling
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace thinlayer
