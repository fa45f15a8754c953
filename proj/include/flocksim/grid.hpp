#pragma once

#include <cstdint>
#include <string>

#include "flocksim/errors.hpp"
#include "flocksim/vec.hpp"

namespace flocksim {

enum class BoundaryMode { periodic, clamped };

inline const char* to_string(BoundaryMode m) {
  return m == BoundaryMode::periodic ? "periodic" : "clamped";
}

// Uniform cell-centered tensor grid over a box in position space.
// Cell centers are x_i = lo + (i + 1/2) * dx; the cell volume is the
// quadrature weight for every integral over the box.
template <int D>
struct SpatialGrid {
  static_assert(D >= 1 && D <= 3);

  Vec<D> lo{};
  Vec<D> hi{};
  Index<D> n{};
  BoundaryMode boundary = BoundaryMode::periodic;

  // derived
  Vec<D> dx{};
  std::int64_t size = 0;
  double cell_volume = 1.0;

  static SpatialGrid make(const Vec<D>& lo, const Vec<D>& hi, const Index<D>& n,
                          BoundaryMode boundary) {
    SpatialGrid g;
    g.lo = lo;
    g.hi = hi;
    g.n = n;
    g.boundary = boundary;
    g.size = 1;
    g.cell_volume = 1.0;
    for (int a = 0; a < D; ++a) {
      if (n[a] < 4)
        throw ArgumentError("spatial grid needs at least 4 cells per axis, got " +
                            std::to_string(n[a]));
      if (!(hi[a] > lo[a]))
        throw ArgumentError("spatial grid axis " + std::to_string(a) +
                            " has non-positive extent");
      g.dx[a] = (hi[a] - lo[a]) / n[a];
      g.size *= n[a];
      g.cell_volume *= g.dx[a];
    }
    return g;
  }

  double length(int axis) const { return hi[axis] - lo[axis]; }

  double min_dx() const {
    double m = dx[0];
    for (int a = 1; a < D; ++a) m = m < dx[a] ? m : dx[a];
    return m;
  }

  std::int64_t flat(const Index<D>& idx) const {
    std::int64_t f = 0;
    for (int a = 0; a < D; ++a) f = f * n[a] + idx[a];
    return f;
  }

  Index<D> unflat(std::int64_t f) const {
    Index<D> idx{};
    for (int a = D - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(f % n[a]);
      f /= n[a];
    }
    return idx;
  }

  Vec<D> center(const Index<D>& idx) const {
    Vec<D> c{};
    for (int a = 0; a < D; ++a) c[a] = lo[a] + (idx[a] + 0.5) * dx[a];
    return c;
  }

  Vec<D> center(std::int64_t f) const { return center(unflat(f)); }

  Vec<D> box_center() const {
    Vec<D> c{};
    for (int a = 0; a < D; ++a) c[a] = 0.5 * (lo[a] + hi[a]);
    return c;
  }

  // Index of the neighbor along `axis`; wraps in periodic mode, clamps to the
  // edge cell in clamped-extension mode.
  int neighbor(int i, int step, int axis) const {
    int j = i + step;
    if (boundary == BoundaryMode::periodic) {
      j %= n[axis];
      if (j < 0) j += n[axis];
    } else {
      if (j < 0) j = 0;
      if (j >= n[axis]) j = n[axis] - 1;
    }
    return j;
  }

  // Distance between cell centers i and j along one axis, taking the periodic
  // minimum image when applicable. `off` is |i - j|.
  double axis_distance(int off, int axis) const {
    if (boundary == BoundaryMode::periodic) {
      const int m = off < n[axis] - off ? off : n[axis] - off;
      return m * dx[axis];
    }
    return off * dx[axis];
  }

  bool operator==(const SpatialGrid&) const = default;
};

// Position grid plus a velocity box symmetric about the origin. The kinetic
// distribution lives on the tensor product; flat phase index = x * nv + v.
template <int D>
struct PhaseGrid {
  SpatialGrid<D> space;
  double v_max = 0.0;
  Index<D> nv{};

  // derived
  Vec<D> dv{};
  std::int64_t v_size = 0;
  std::int64_t size = 0;
  double v_cell_volume = 1.0;
  double cell_volume = 1.0;

  static PhaseGrid make(const SpatialGrid<D>& space, double v_max, const Index<D>& nv) {
    PhaseGrid g;
    g.space = space;
    g.v_max = v_max;
    g.nv = nv;
    if (!(v_max > 0)) throw ArgumentError("velocity box needs v_max > 0");
    g.v_size = 1;
    g.v_cell_volume = 1.0;
    for (int a = 0; a < D; ++a) {
      if (nv[a] < 4)
        throw ArgumentError("velocity grid needs at least 4 cells per axis, got " +
                            std::to_string(nv[a]));
      g.dv[a] = 2.0 * v_max / nv[a];
      g.v_size *= nv[a];
      g.v_cell_volume *= g.dv[a];
    }
    g.size = space.size * g.v_size;
    g.cell_volume = space.cell_volume * g.v_cell_volume;
    return g;
  }

  double max_dv() const {
    double m = dv[0];
    for (int a = 1; a < D; ++a) m = m > dv[a] ? m : dv[a];
    return m;
  }

  std::int64_t v_flat(const Index<D>& idx) const {
    std::int64_t f = 0;
    for (int a = 0; a < D; ++a) f = f * nv[a] + idx[a];
    return f;
  }

  Index<D> v_unflat(std::int64_t f) const {
    Index<D> idx{};
    for (int a = D - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(f % nv[a]);
      f /= nv[a];
    }
    return idx;
  }

  Vec<D> v_center(const Index<D>& idx) const {
    Vec<D> c{};
    for (int a = 0; a < D; ++a) c[a] = -v_max + (idx[a] + 0.5) * dv[a];
    return c;
  }

  Vec<D> v_center(std::int64_t f) const { return v_center(v_unflat(f)); }

  std::int64_t flat(std::int64_t x_cell, std::int64_t v_cell) const {
    return x_cell * v_size + v_cell;
  }

  bool operator==(const PhaseGrid&) const = default;
};

}  // namespace flocksim
