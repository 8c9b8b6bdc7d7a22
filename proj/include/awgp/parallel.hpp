#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace awgp {

/// Process-wide default worker count used when an operation is given 0.
/// Initialised from the AWGP_THREADS environment variable, otherwise 1.
unsigned default_threads();
void set_default_threads(unsigned n);

inline unsigned resolve_threads(unsigned requested) {
  return requested == 0 ? default_threads() : requested;
}

/// Runs f(i) for i in [0, n) on up to `threads` workers with a static
/// contiguous split. Results must be written to per-index slots; callers
/// reduce afterwards in index order, so output does not depend on the
/// worker count. If several indices throw, the exception of the smallest
/// index is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(std::max(1u, resolve_threads(threads)), std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr first;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (i < first_index) {
            first_index = i;
            first = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

/// Pairwise (tree) summation with a fixed split topology.
double pairwise_sum(std::span<const double> xs);

}  // namespace awgp
