#pragma once

// Row-level parallel helper. Work items write disjoint outputs, so results are
// bit-identical for every thread count.

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace msmooth {

namespace detail {
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{0};  // 0 = use hardware concurrency
  return cap;
}
}  // namespace detail

/// Caps worker threads for all library calls; 0 restores the hardware default.
inline void set_max_threads(int n) { detail::thread_cap().store(n < 0 ? 0 : n); }

inline int max_threads() {
  const int cap = detail::thread_cap().load();
  if (cap > 0) return cap;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [begin, end). fn must not touch state shared across i.
template <class F>
void parallel_for(int begin, int end, F&& fn) {
  const int count = end - begin;
  if (count <= 0) return;
  const int workers = std::min(max_threads(), count);
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<int> next{begin};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::atomic<int> error_claim{0};  // first error wins
  auto work = [&]() {
    try {
      for (int i = next.fetch_add(1); i < end && !failed.load(std::memory_order_relaxed);
           i = next.fetch_add(1)) {
        fn(i);
      }
    } catch (...) {
      int expected = 0;
      if (error_claim.compare_exchange_strong(expected, 1)) error = std::current_exception();
      failed.store(true);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 0; t < workers - 1; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace msmooth
