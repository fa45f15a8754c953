#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flocksim/errors.hpp"
#include "flocksim/grid.hpp"
#include "flocksim/reduce.hpp"
#include "flocksim/vec.hpp"

namespace flocksim {

// Velocity moments of the distribution on the spatial grid:
//   n  = integral of f over v          (scalar, one per x cell)
//   m1 = integral of f * v over v      (vector, interleaved per x cell)
//   m2 = integral of f * |v|^2 over v  (scalar)
template <int D>
struct Moments {
  std::vector<double> n;
  std::vector<double> m1;
  std::vector<double> m2;
};

// The kinetic distribution f >= 0 on the phase grid plus lazily cached
// moments. `version` increases on every mutation; alignment fields remember
// the version they were built from so stale use is detectable.
template <int D>
struct KineticState {
  PhaseGrid<D> grid;
  std::vector<double> f;
  std::uint64_t version = 0;

  KineticState() = default;
  explicit KineticState(const PhaseGrid<D>& g)
      : grid(g), f(static_cast<std::size_t>(g.size), 0.0) {}

  const Moments<D>& moments() const {
    if (!cached_) cached_ = compute_moments();
    return *cached_;
  }

  bool moments_valid() const { return cached_.has_value(); }

  void invalidate(std::uint64_t new_version) {
    version = new_version;
    cached_.reset();
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : f) {
      const double a = std::abs(x);
      if (a > m) m = a;
    }
    return m;
  }

  bool operator==(const KineticState& o) const {
    return grid == o.grid && f == o.f && version == o.version;
  }

 private:
  mutable std::optional<Moments<D>> cached_;

  Moments<D> compute_moments() const {
    Moments<D> mom;
    const std::int64_t nx = grid.space.size;
    const std::int64_t nv = grid.v_size;
    const double w = grid.v_cell_volume;
    mom.n.assign(nx, 0.0);
    mom.m1.assign(nx * D, 0.0);
    mom.m2.assign(nx, 0.0);

    // reject non-finite input before entering the parallel region
    for (std::int64_t i = 0; i < grid.size; ++i) {
      if (!std::isfinite(f[i]))
        throw ArgumentError("non-finite f at phase cell " + std::to_string(i));
    }

    // precompute velocity centers once; shared across spatial cells
    std::vector<Vec<D>> vc(static_cast<std::size_t>(nv));
    for (std::int64_t j = 0; j < nv; ++j) vc[j] = grid.v_center(j);

#pragma omp parallel for schedule(static)
    for (std::int64_t xi = 0; xi < nx; ++xi) {
      const double* fx = f.data() + xi * nv;
      mom.n[xi] = w * pairwise_sum(nv, [&](std::int64_t j) { return fx[j]; });
      for (int c = 0; c < D; ++c)
        mom.m1[xi * D + c] =
            w * pairwise_sum(nv, [&](std::int64_t j) { return fx[j] * vc[j][c]; });
      mom.m2[xi] =
          w * pairwise_sum(nv, [&](std::int64_t j) { return fx[j] * norm2<D>(vc[j]); });
    }
    return mom;
  }
};

// Compressible fluid state in conservative variables: density rho >= 0 and
// momentum q = rho * u. The velocity is a derived quantity: q / rho with an
// eps_vac floor, reported as exactly zero in vacuum cells.
template <int D>
struct FluidState {
  SpatialGrid<D> grid;
  std::vector<double> rho;
  std::vector<double> q;  // interleaved components, size grid.size * D
  double eps_vac = 1e-10;

  FluidState() = default;
  explicit FluidState(const SpatialGrid<D>& g, double eps = 1e-10)
      : grid(g),
        rho(static_cast<std::size_t>(g.size), 0.0),
        q(static_cast<std::size_t>(g.size) * D, 0.0),
        eps_vac(eps) {}

  std::vector<double> velocity() const {
    std::vector<double> u(q.size(), 0.0);
    for (std::int64_t i = 0; i < grid.size; ++i) {
      if (rho[i] > eps_vac) {
        for (int c = 0; c < D; ++c) u[i * D + c] = q[i * D + c] / rho[i];
      }
    }
    return u;
  }

  bool operator==(const FluidState& o) const {
    return grid == o.grid && rho == o.rho && q == o.q && eps_vac == o.eps_vac;
  }
};

// Full phase-space quadrature of f (the L^1 mass; f is nonnegative).
template <int D>
double mass_l1(const KineticState<D>& kin) {
  const auto& mom = kin.moments();
  return kin.grid.space.cell_volume *
         pairwise_sum(kin.grid.space.size, [&](std::int64_t i) { return mom.n[i]; });
}

}  // namespace flocksim
