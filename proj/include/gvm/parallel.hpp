#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gvm {

inline int default_thread_count() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs body(begin, end) over contiguous blocks of [0, n) on `threads` threads.
// Results must not depend on the partition: blocks write to disjoint outputs
// or reduce through order-independent operations (max, per-slot writes).
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  if (n == 0) return;
  const std::size_t nthreads =
      std::min<std::size_t>(threads <= 1 ? 1 : static_cast<std::size_t>(threads), n);
  if (nthreads == 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::vector<std::exception_ptr> errors(nthreads);
  const std::size_t chunk = (n + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&, t, lo, hi] {
      try {
        if (lo < hi) body(lo, hi);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gvm
