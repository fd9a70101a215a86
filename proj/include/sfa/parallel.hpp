#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sfa {

// Runs fn(i) for i in [0, n) on up to n_workers threads. Each call writes
// only to its own output slot, so the schedule cannot affect results;
// reductions over the slots must then happen in fixed index order.
template <class Fn>
void parallel_for(std::size_t n, unsigned n_workers, Fn&& fn) {
  if (n == 0) return;
  if (n_workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(n_workers, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Sums v[0..n) as a fixed-shape pairwise tree. The tree depends only on n,
// so the result is bit-identical across runs and worker counts.
template <class T>
T pairwise_sum(const T* v, std::size_t n) {
  if (n == 0) return T{};
  if (n <= 8) {
    T acc = v[0];
    for (std::size_t i = 1; i < n; ++i) acc += v[i];
    return acc;
  }
  const std::size_t half = n / 2;
  T lo = pairwise_sum(v, half);
  T hi = pairwise_sum(v + half, n - half);
  return lo + hi;
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace sfa
