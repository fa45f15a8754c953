#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "flocksim/alignment.hpp"
#include "flocksim/characteristics.hpp"
#include "flocksim/errors.hpp"
#include "flocksim/interp.hpp"
#include "flocksim/state.hpp"

namespace flocksim {

// Largest |v| carried by the support of f. Cells count as support when their
// value exceeds `threshold` (default 1e-14 * max f). Zero for f == 0.
template <int D>
double support_radius(const KineticState<D>& kin, double threshold = -1.0) {
  if (threshold < 0) threshold = 1e-14 * kin.max_abs();
  const PhaseGrid<D>& g = kin.grid;
  double r2max = 0.0;
  for (std::int64_t p = 0; p < g.size; ++p) {
    if (kin.f[p] > threshold) {
      const double r2 = norm2<D>(g.v_center(p % g.v_size));
      if (r2 > r2max) r2max = r2;
    }
  }
  return std::sqrt(r2max);
}

// One semi-Lagrangian step of the kinetic equation. For every destination
// phase cell the characteristic is traced backward with the coefficients
// (a, b, u) frozen at the arrival spatial cell, the old f is interpolated at
// the departure point, and the exact phase-volume factor J is applied:
//
//   f'(x, v) = J * f(x_b, v_b),   J = exp(D (1 + a) dt).
//
// Positivity is exact (convex interpolation times positive J); mass is
// conserved only up to discretization error, which the diagnostics monitor.
//
// A departure velocity outside the box is legal only where f is negligible:
// if the clamped-edge value, amplified, exceeds 1e-14 * max f the step throws
// SupportEscape, signaling that the velocity box is too small for this run.
template <int D>
KineticState<D> kinetic_step(const KineticState<D>& kin, std::span<const double> u,
                             const AlignmentFields<D>& af, double dt) {
  if (af.version != kin.version)
    throw StalenessError("alignment fields built from kinetic state version " +
                         std::to_string(af.version) + ", stepping version " +
                         std::to_string(kin.version));
  const PhaseGrid<D>& g = kin.grid;
  const SpatialGrid<D>& sg = g.space;
  const bool periodic = sg.boundary == BoundaryMode::periodic;
  const double escape_tol = 1e-14 * kin.max_abs();

  KineticState<D> out(g);
  std::atomic<bool> escaped{false};
  std::vector<double> escape_point;

  // precompute velocity centers; shared by all spatial cells
  std::vector<Vec<D>> vc(static_cast<std::size_t>(g.v_size));
  for (std::int64_t j = 0; j < g.v_size; ++j) vc[j] = g.v_center(j);

#pragma omp parallel for schedule(static)
  for (std::int64_t xi = 0; xi < sg.size; ++xi) {
    if (escaped.load(std::memory_order_relaxed)) continue;
    const Vec<D> x = sg.center(xi);
    const double a = af.a[xi];
    Vec<D> b{}, uv{};
    for (int c = 0; c < D; ++c) {
      b[c] = af.b[xi * D + c];
      uv[c] = u[xi * D + c];
    }
    // lam, c and the exponentials are shared by every velocity in this column
    const double lam = 1.0 + a;
    const double em1 = std::expm1(lam * dt);
    const double jac = std::exp(static_cast<double>(D) * lam * dt);
    Vec<D> cc{};
    for (int c = 0; c < D; ++c) cc[c] = (b[c] + uv[c]) / lam;

    for (std::int64_t vj = 0; vj < g.v_size; ++vj) {
      Vec<D> x_b, v_b;
      bool v_out = false;
      for (int c = 0; c < D; ++c) {
        const double dev = vc[vj][c] - cc[c];
        v_b[c] = cc[c] + dev * (1.0 + em1);
        x_b[c] = x[c] - (cc[c] * dt + dev * em1 / lam);
        if (v_b[c] < -g.v_max || v_b[c] > g.v_max) v_out = true;
      }

      bool x_out = false;
      if (!periodic) {
        for (int c = 0; c < D; ++c)
          if (x_b[c] < sg.lo[c] || x_b[c] > sg.hi[c]) x_out = true;
      }

      if (v_out || x_out) {
        // evaluate at the nearest in-box point; significant mass there means
        // the support reached the box and the result would be corrupted
        Vec<D> xq = x_b, vq = v_b;
        for (int c = 0; c < D; ++c) {
          if (vq[c] < -g.v_max) vq[c] = -g.v_max;
          if (vq[c] > g.v_max) vq[c] = g.v_max;
          if (!periodic) {
            if (xq[c] < sg.lo[c]) xq[c] = sg.lo[c];
            if (xq[c] > sg.hi[c]) xq[c] = sg.hi[c];
          }
        }
        const double edge = jac * interpolate<D>(g, kin.f, xq, vq);
        if (edge > escape_tol) {
          bool expected = false;
          if (escaped.compare_exchange_strong(expected, true)) {
#pragma omp critical
            {
              escape_point.assign(x_b.begin(), x_b.end());
              escape_point.insert(escape_point.end(), v_b.begin(), v_b.end());
            }
          }
          break;
        }
        out.f[g.flat(xi, vj)] = 0.0;
        continue;
      }

      out.f[g.flat(xi, vj)] = jac * interpolate<D>(g, kin.f, x_b, v_b);
    }
  }

  if (escaped.load())
    throw SupportEscape(
        "backtraced characteristic with significant mass left the velocity box; "
        "increase v_max",
        escape_point);

  out.invalidate(kin.version + 1);
  return out;
}

}  // namespace flocksim
