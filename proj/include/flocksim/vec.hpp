#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace flocksim {

template <int D>
using Vec = std::array<double, D>;

template <int D>
using Index = std::array<int, D>;

template <int D>
constexpr Vec<D> operator+(const Vec<D>& a, const Vec<D>& b) {
  Vec<D> r{};
  for (int i = 0; i < D; ++i) r[i] = a[i] + b[i];
  return r;
}

template <int D>
constexpr Vec<D> operator-(const Vec<D>& a, const Vec<D>& b) {
  Vec<D> r{};
  for (int i = 0; i < D; ++i) r[i] = a[i] - b[i];
  return r;
}

template <int D>
constexpr Vec<D> operator*(double s, const Vec<D>& a) {
  Vec<D> r{};
  for (int i = 0; i < D; ++i) r[i] = s * a[i];
  return r;
}

template <int D>
constexpr double dot(const Vec<D>& a, const Vec<D>& b) {
  double s = 0;
  for (int i = 0; i < D; ++i) s += a[i] * b[i];
  return s;
}

template <int D>
constexpr double norm2(const Vec<D>& a) {
  return dot<D>(a, a);
}

template <int D>
inline double norm(const Vec<D>& a) {
  return std::sqrt(norm2<D>(a));
}

template <int D>
constexpr Vec<D> filled(double v) {
  Vec<D> r{};
  r.fill(v);
  return r;
}

}  // namespace flocksim
