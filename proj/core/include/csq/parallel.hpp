#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace csq {

/// Runs fn(i) for i in [0, count) on up to `threads` workers with static
/// contiguous chunks. Callers write into per-index slots, so reductions stay
/// in index order no matter how many workers ran.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1));
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_lock;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> guard(error_lock);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

/// Process-wide default worker count used when an options struct leaves
/// threads at 0. Set by the CLI from --threads / CSQ_LAB_THREADS.
unsigned default_threads() noexcept;
void set_default_threads(unsigned threads) noexcept;

inline unsigned resolve_threads(unsigned requested) noexcept {
  return requested == 0 ? default_threads() : requested;
}

}  // namespace csq
