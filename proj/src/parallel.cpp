#include "awgp/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace awgp {

namespace {

unsigned threads_from_env() {
  if (const char* env = std::getenv("AWGP_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return 1;
}

std::atomic<unsigned>& default_threads_slot() {
  static std::atomic<unsigned> slot{threads_from_env()};
  return slot;
}

}  // namespace

unsigned default_threads() { return default_threads_slot().load(); }

void set_default_threads(unsigned n) { default_threads_slot().store(n == 0 ? 1 : n); }

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace awgp
