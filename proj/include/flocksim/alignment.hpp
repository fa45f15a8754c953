#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "flocksim/errors.hpp"
#include "flocksim/grid.hpp"
#include "flocksim/kernel.hpp"
#include "flocksim/reduce.hpp"
#include "flocksim/state.hpp"
#include "flocksim/vec.hpp"

namespace flocksim {

// Nonlocal alignment fields built from the moments of f:
//   a = phi * n   (convolution; scalar, 0 <= a <= total mass since phi <= 1)
//   b = phi * m1  (vector)
// The alignment force at (x, v) is then L(x, v) = b(x) - a(x) v.
template <int D>
struct AlignmentFields {
  std::vector<double> a;
  std::vector<double> b;  // interleaved, size n * D
  std::uint64_t version = 0;

  bool operator==(const AlignmentFields&) const = default;
};

// phi(distance between cell centers) tabulated per absolute index offset, so a
// grid convolution needs no kernel evaluations in the inner loop. Distances
// take the periodic minimum image when the grid is periodic and plain
// Euclidean distances otherwise, so the direct sum is boundary-mode agnostic.
template <int D>
class ConvolutionTable {
 public:
  ConvolutionTable() = default;

  ConvolutionTable(const SpatialGrid<D>& grid, const Kernel& kernel) : grid_(grid) {
    table_.resize(static_cast<std::size_t>(grid.size));
    for (std::int64_t o = 0; o < grid.size; ++o) {
      const Index<D> off = grid.unflat(o);
      double r2 = 0.0;
      for (int a = 0; a < D; ++a) {
        const double da = grid.axis_distance(off[a], a);
        r2 += da * da;
      }
      table_[o] = kernel.phi(std::sqrt(r2));
    }
  }

  const SpatialGrid<D>& grid() const { return grid_; }

  double phi_at_offset(const Index<D>& i, const Index<D>& j) const {
    Index<D> off{};
    for (int a = 0; a < D; ++a) off[a] = i[a] >= j[a] ? i[a] - j[a] : j[a] - i[a];
    return table_[grid_.flat(off)];
  }

  // (phi * field)(x_i) = sum_j phi(dist(i, j)) field(j) * cell_volume
  std::vector<double> convolve(std::span<const double> field) const {
    const std::int64_t n = grid_.size;
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const Index<D> ii = grid_.unflat(i);
      out[i] = grid_.cell_volume * pairwise_sum(n, [&](std::int64_t j) {
                 return phi_at_offset(ii, grid_.unflat(j)) * field[j];
               });
    }
    return out;
  }

  // Convolve one interleaved component of a vector field.
  std::vector<double> convolve_component(std::span<const double> vec, int c) const {
    const std::int64_t n = grid_.size;
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const Index<D> ii = grid_.unflat(i);
      out[i] = grid_.cell_volume * pairwise_sum(n, [&](std::int64_t j) {
                 return phi_at_offset(ii, grid_.unflat(j)) * vec[j * D + c];
               });
    }
    return out;
  }

 private:
  SpatialGrid<D> grid_;
  std::vector<double> table_;
};

template <int D>
AlignmentFields<D> build_alignment(const Moments<D>& mom, const ConvolutionTable<D>& conv,
                                   std::uint64_t version) {
  for (double ni : mom.n)
    if (ni < 0) throw ArgumentError("negative number density passed to alignment build");
  AlignmentFields<D> af;
  af.version = version;
  af.a = conv.convolve(mom.n);
  af.b.assign(mom.m1.size(), 0.0);
  for (int c = 0; c < D; ++c) {
    const std::vector<double> bc = conv.convolve_component(mom.m1, c);
    for (std::int64_t i = 0; i < conv.grid().size; ++i) af.b[i * D + c] = bc[i];
  }
  return af;
}

template <int D>
AlignmentFields<D> build_alignment(const KineticState<D>& kin,
                                   const ConvolutionTable<D>& conv) {
  return build_alignment<D>(kin.moments(), conv, kin.version);
}

// The alignment force L(x, v) = b(x) - a(x) v at one spatial cell.
template <int D>
Vec<D> eval_L(const AlignmentFields<D>& af, std::int64_t cell, const Vec<D>& v) {
  Vec<D> out{};
  for (int c = 0; c < D; ++c) out[c] = af.b[cell * D + c] - af.a[cell] * v[c];
  return out;
}

// Quadratic alignment dissipation
//   1/2 * integral of phi(|x - y|) f(y, v*) f(x, v) (v* - v)^2
// reduced exactly to moments via (v* - v)^2 = |v*|^2 - 2 v . v* + |v|^2:
//   1/2 [ <n, phi*m2> + <m2, phi*n> - 2 <m1, phi*m1> ]
// A positive-semidefinite quadratic form: nonnegative for every f >= 0.
template <int D>
double alignment_dissipation(const Moments<D>& mom, const ConvolutionTable<D>& conv) {
  const std::int64_t n = conv.grid().size;
  const double vol = conv.grid().cell_volume;
  const std::vector<double> pn = conv.convolve(mom.n);
  const std::vector<double> pm2 = conv.convolve(mom.m2);
  double cross = 0.0;
  for (int c = 0; c < D; ++c) {
    const std::vector<double> pm1 = conv.convolve_component(mom.m1, c);
    cross += pairwise_sum(n, [&](std::int64_t i) { return mom.m1[i * D + c] * pm1[i]; });
  }
  const double t1 = pairwise_sum(n, [&](std::int64_t i) { return mom.n[i] * pm2[i]; });
  const double t2 = pairwise_sum(n, [&](std::int64_t i) { return mom.m2[i] * pn[i]; });
  return 0.5 * vol * (t1 + t2 - 2.0 * cross);
}

}  // namespace flocksim
