#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hessdisc {

/// Worker count: hardware concurrency, capped by HESSDISC_THREADS when set.
inline unsigned worker_count() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("HESSDISC_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v < 4096) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

/// Index-parallel map. Each item writes only into its own slot, and callers
/// reduce over slots in index order afterwards, so results are identical
/// regardless of how the indices were partitioned across threads.
template <class F>
void parallel_for(size_t n, F&& fn) {
  unsigned workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  unsigned spawn = std::min<unsigned>(workers, static_cast<unsigned>(n));
  pool.reserve(spawn);
  for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace hessdisc
