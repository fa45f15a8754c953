#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace flocksim {

// Deterministic pairwise (tree) reduction. The summation order depends only on
// the index range, never on thread count or partition, so every quadrature and
// norm in the library is bit-stable across runs. Pairwise also keeps the
// accumulation error near O(eps * log n) instead of O(eps * n).
template <class F>
double pairwise_sum(std::int64_t begin, std::int64_t end, const F& value) {
  const std::int64_t n = end - begin;
  if (n <= 32) {
    double s = 0.0;
    for (std::int64_t i = begin; i < end; ++i) s += value(i);
    return s;
  }
  const std::int64_t mid = begin + n / 2;
  return pairwise_sum(begin, mid, value) + pairwise_sum(mid, end, value);
}

template <class F>
double pairwise_sum(std::int64_t n, const F& value) {
  return pairwise_sum<F>(0, n, value);
}

inline double pairwise_sum(std::span<const double> xs) {
  return pairwise_sum(static_cast<std::int64_t>(xs.size()),
                      [&](std::int64_t i) { return xs[i]; });
}

}  // namespace flocksim
