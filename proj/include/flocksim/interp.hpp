#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "flocksim/errors.hpp"
#include "flocksim/grid.hpp"
#include "flocksim/vec.hpp"

namespace flocksim {

namespace detail {

// Left node index and right-node weight for a cell-centered axis. The
// interpolation cell is the interval between the two adjacent cell centers.
struct AxisWeight {
  int i0;
  double w1;  // weight of node i0 + 1; node i0 gets 1 - w1
};

inline AxisWeight axis_weight(double coord, double lo, double dx) {
  const double s = (coord - lo) / dx - 0.5;
  double fl = std::floor(s);
  AxisWeight aw;
  aw.i0 = static_cast<int>(fl);
  aw.w1 = s - fl;
  return aw;
}

}  // namespace detail

// Multilinear interpolation of a phase-space field at an arbitrary point.
//
// Position axes follow the spatial boundary mode: indices wrap when periodic,
// extend by the edge value when clamped. Velocity axes extend by zero outside
// the box, which preserves compact support and nonnegativity but means callers
// must keep significant mass away from the box edge (see kinetic_step).
//
// In clamped mode a position more than one cell outside the box is a support
// escape: the constant extension would fabricate values there.
template <int D>
double interpolate(const PhaseGrid<D>& grid, std::span<const double> f,
                   const Vec<D>& x, const Vec<D>& v) {
  const SpatialGrid<D>& sg = grid.space;
  detail::AxisWeight wx[D], wv[D];
  for (int a = 0; a < D; ++a) {
    if (sg.boundary == BoundaryMode::clamped) {
      if (x[a] < sg.lo[a] - sg.dx[a] || x[a] > sg.hi[a] + sg.dx[a]) {
        std::vector<double> pt(x.begin(), x.end());
        pt.insert(pt.end(), v.begin(), v.end());
        throw SupportEscape("interpolation point outside clamped spatial box", pt);
      }
    }
    wx[a] = detail::axis_weight(x[a], sg.lo[a], sg.dx[a]);
    wv[a] = detail::axis_weight(v[a], -grid.v_max, grid.dv[a]);
  }

  double result = 0.0;
  // corners enumerated by a 2D-bit mask: low D bits pick x nodes, high D pick v
  for (unsigned mask = 0; mask < (1u << (2 * D)); ++mask) {
    double weight = 1.0;
    Index<D> xi{}, vi{};
    bool zero = false;
    for (int a = 0; a < D; ++a) {
      const int bx = (mask >> a) & 1u;
      int ix = wx[a].i0 + bx;
      weight *= bx ? wx[a].w1 : 1.0 - wx[a].w1;
      if (sg.boundary == BoundaryMode::periodic) {
        ix %= sg.n[a];
        if (ix < 0) ix += sg.n[a];
      } else {
        if (ix < 0) ix = 0;
        if (ix >= sg.n[a]) ix = sg.n[a] - 1;
      }
      xi[a] = ix;

      const int bv = (mask >> (D + a)) & 1u;
      const int iv = wv[a].i0 + bv;
      weight *= bv ? wv[a].w1 : 1.0 - wv[a].w1;
      if (iv < 0 || iv >= grid.nv[a]) {
        zero = true;  // zero extension beyond the velocity box
        break;
      }
      vi[a] = iv;
    }
    if (zero || weight == 0.0) continue;
    result += weight * f[grid.flat(sg.flat(xi), grid.v_flat(vi))];
  }
  return result;
}

}  // namespace flocksim
