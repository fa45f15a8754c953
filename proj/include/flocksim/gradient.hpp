#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flocksim/grid.hpp"
#include "flocksim/vec.hpp"

namespace flocksim {

namespace detail {

// Second-order derivative along one axis of a line of samples with stride.
// Central in the interior; wraps when periodic; one-sided second-order at
// clamped edges (exact for affine data everywhere).
inline double d_along(const double* base, std::int64_t stride, int i, int n,
                      double h, bool periodic) {
  auto at = [&](int j) { return base[static_cast<std::int64_t>(j) * stride]; };
  if (periodic) {
    const int ip = i + 1 == n ? 0 : i + 1;
    const int im = i == 0 ? n - 1 : i - 1;
    return (at(ip) - at(im)) / (2.0 * h);
  }
  if (i == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (i == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
  return (at(i + 1) - at(i - 1)) / (2.0 * h);
}

}  // namespace detail

// Gradient of a scalar field on the spatial grid; output interleaved, size n*D.
template <int D>
std::vector<double> grad_spatial(const SpatialGrid<D>& g, std::span<const double> field) {
  std::vector<double> out(static_cast<std::size_t>(g.size) * D, 0.0);
  const bool periodic = g.boundary == BoundaryMode::periodic;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < g.size; ++i) {
    const Index<D> idx = g.unflat(i);
    for (int a = 0; a < D; ++a) {
      // stride of axis a in the flat row-major layout
      std::int64_t stride = 1;
      for (int b = a + 1; b < D; ++b) stride *= g.n[b];
      const double* base = field.data() + (i - static_cast<std::int64_t>(idx[a]) * stride);
      out[i * D + a] = detail::d_along(base, stride, idx[a], g.n[a], g.dx[a], periodic);
    }
  }
  return out;
}

// Jacobian of a vector field u (interleaved); out[(i*D + r)*D + c] = du_r/dx_c.
template <int D>
std::vector<double> jacobian(const SpatialGrid<D>& g, std::span<const double> u) {
  std::vector<double> out(static_cast<std::size_t>(g.size) * D * D, 0.0);
  const bool periodic = g.boundary == BoundaryMode::periodic;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < g.size; ++i) {
    const Index<D> idx = g.unflat(i);
    for (int c = 0; c < D; ++c) {
      std::int64_t stride = 1;
      for (int b = c + 1; b < D; ++b) stride *= g.n[b];
      for (int r = 0; r < D; ++r) {
        const double* base =
            u.data() + (i - static_cast<std::int64_t>(idx[c]) * stride) * D + r;
        out[(i * D + r) * D + c] =
            detail::d_along(base, stride * D, idx[c], g.n[c], g.dx[c], periodic);
      }
    }
  }
  return out;
}

template <int D>
std::vector<double> divergence(const SpatialGrid<D>& g, std::span<const double> u) {
  std::vector<double> out(static_cast<std::size_t>(g.size), 0.0);
  const bool periodic = g.boundary == BoundaryMode::periodic;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < g.size; ++i) {
    const Index<D> idx = g.unflat(i);
    double s = 0.0;
    for (int a = 0; a < D; ++a) {
      std::int64_t stride = 1;
      for (int b = a + 1; b < D; ++b) stride *= g.n[b];
      const double* base =
          u.data() + (i - static_cast<std::int64_t>(idx[a]) * stride) * D + a;
      s += detail::d_along(base, stride * D, idx[a], g.n[a], g.dx[a], periodic);
    }
    out[i] = s;
  }
  return out;
}

// d/dx_axis of a phase-space field at fixed velocity index.
template <int D>
std::vector<double> grad_x_phase(const PhaseGrid<D>& g, std::span<const double> f,
                                 int axis) {
  std::vector<double> out(static_cast<std::size_t>(g.size), 0.0);
  const SpatialGrid<D>& sg = g.space;
  const bool periodic = sg.boundary == BoundaryMode::periodic;
  std::int64_t xstride = g.v_size;
  for (int b = axis + 1; b < D; ++b) xstride *= sg.n[b];
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < g.size; ++p) {
    const std::int64_t xi = p / g.v_size;
    const int ia = sg.unflat(xi)[axis];
    const double* base = f.data() + (p - static_cast<std::int64_t>(ia) * xstride);
    out[p] = detail::d_along(base, xstride, ia, sg.n[axis], sg.dx[axis], periodic);
  }
  return out;
}

// d/dv_axis of a phase-space field; the velocity box is never periodic, so
// edges use the one-sided stencil.
template <int D>
std::vector<double> grad_v_phase(const PhaseGrid<D>& g, std::span<const double> f,
                                 int axis) {
  std::vector<double> out(static_cast<std::size_t>(g.size), 0.0);
  std::int64_t vstride = 1;
  for (int b = axis + 1; b < D; ++b) vstride *= g.nv[b];
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < g.size; ++p) {
    const std::int64_t vj = p % g.v_size;
    const int ja = g.v_unflat(vj)[axis];
    const double* base = f.data() + (p - static_cast<std::int64_t>(ja) * vstride);
    out[p] = detail::d_along(base, vstride, ja, g.nv[axis], g.dv[axis], false);
  }
  return out;
}

}  // namespace flocksim
