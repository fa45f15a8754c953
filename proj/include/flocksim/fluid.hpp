#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flocksim/errors.hpp"
#include "flocksim/gradient.hpp"
#include "flocksim/grid.hpp"
#include "flocksim/state.hpp"

namespace flocksim {

// Viscosity pair (mu, lambda) and adiabatic exponent gamma for the isentropic
// pressure law P = rho^gamma. The admissible set is mu > 0, 2 mu + d lambda >= 0
// (the d-dimensional form of the physical restriction) and gamma > 1.
struct FluidParams {
  double mu = 0.1;
  double lambda = 0.0;
  double gamma = 1.4;
  double eps_vac = 1e-10;

  void validate(int d) const {
    if (!(mu > 0)) throw ConfigError("mu = " + std::to_string(mu) + " violates mu > 0");
    if (2.0 * mu + d * lambda < 0)
      throw ConfigError("lambda = " + std::to_string(lambda) +
                        " violates 2 mu + d lambda >= 0");
    if (!(gamma > 1))
      throw ConfigError("gamma = " + std::to_string(gamma) +
                        " violates gamma > 1 (pressure law P = rho^gamma)");
  }

  double sound_speed(double rho) const {
    return rho > 0 ? std::sqrt(gamma * std::pow(rho, gamma - 1.0)) : 0.0;
  }
};

// P = rho^gamma per cell.
inline std::vector<double> pressure(std::span<const double> rho, double gamma) {
  std::vector<double> p(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) p[i] = std::pow(rho[i], gamma);
  return p;
}

// Momentum exchange with the particle phase: integral of f (v - u) over v,
// which reduces exactly to m1(x) - n(x) u(x).
template <int D>
std::vector<double> drag_source(const KineticState<D>& kin, std::span<const double> u) {
  const Moments<D>& mom = kin.moments();
  const std::int64_t n = kin.grid.space.size;
  std::vector<double> out(static_cast<std::size_t>(n) * D, 0.0);
  for (std::int64_t i = 0; i < n; ++i)
    for (int c = 0; c < D; ++c) out[i * D + c] = mom.m1[i * D + c] - mom.n[i] * u[i * D + c];
  return out;
}

namespace detail {

// Accumulates -div of first-order upwind fluxes for the carried fields
// (rho and the D momentum components) using face velocities averaged from the
// advecting field `w`. Flux form: every interior face contributes exactly
// opposite amounts to its two cells, so the box total telescopes.
// In clamped mode the ghost state equals the edge cell (free in/outflow).
template <int D>
void add_upwind_div(const SpatialGrid<D>& g, std::span<const double> rho,
                    std::span<const double> q, std::span<const double> w,
                    std::span<double> drho, std::span<double> dq) {
  const bool periodic = g.boundary == BoundaryMode::periodic;
  for (int a = 0; a < D; ++a) {
    std::int64_t stride = 1;
    for (int b = a + 1; b < D; ++b) stride *= g.n[b];
    const double inv_dx = 1.0 / g.dx[a];
    for (std::int64_t i = 0; i < g.size; ++i) {
      const int ia = g.unflat(i)[a];
      // right face of cell i
      std::int64_t j;
      if (ia + 1 < g.n[a]) j = i + stride;
      else if (periodic) j = i - static_cast<std::int64_t>(ia) * stride;
      else j = i;  // ghost = edge cell
      const double wf = 0.5 * (w[i * D + a] + w[j * D + a]);
      const std::int64_t up = wf > 0 ? i : j;
      const double frho = rho[up] * wf;
      drho[i] -= frho * inv_dx;
      if (j != i) drho[j] += frho * inv_dx;
      for (int c = 0; c < D; ++c) {
        const double fq = q[up * D + c] * wf;
        dq[i * D + c] -= fq * inv_dx;
        if (j != i) dq[j * D + c] += fq * inv_dx;
      }
      // left boundary face (clamped mode only; interior left faces are the
      // right faces of the neighbor, periodic wrap covers the seam face)
      if (!periodic && ia == 0) {
        const double wg = w[i * D + a];  // ghost shares the edge velocity
        const double frho_g = rho[i] * wg;
        drho[i] += frho_g * inv_dx;
        for (int c = 0; c < D; ++c) dq[i * D + c] += q[i * D + c] * wg * inv_dx;
      }
    }
  }
}

// mu * lap(u) + (mu + lambda) * grad(div u), central second order.
template <int D>
std::vector<double> viscous_force(const SpatialGrid<D>& g, std::span<const double> u,
                                  double mu, double lambda) {
  std::vector<double> out(static_cast<std::size_t>(g.size) * D, 0.0);
  const bool periodic = g.boundary == BoundaryMode::periodic;
  for (int a = 0; a < D; ++a) {
    std::int64_t stride = 1;
    for (int b = a + 1; b < D; ++b) stride *= g.n[b];
    const double inv_dx2 = 1.0 / (g.dx[a] * g.dx[a]);
    for (std::int64_t i = 0; i < g.size; ++i) {
      const int ia = g.unflat(i)[a];
      std::int64_t ip = i + stride, im = i - stride;
      if (ia + 1 >= g.n[a]) ip = periodic ? i - static_cast<std::int64_t>(ia) * stride : i;
      if (ia == 0) im = periodic ? i + static_cast<std::int64_t>(g.n[a] - 1) * stride : i;
      for (int c = 0; c < D; ++c)
        out[i * D + c] +=
            mu * (u[ip * D + c] - 2.0 * u[i * D + c] + u[im * D + c]) * inv_dx2;
    }
  }
  const std::vector<double> div = divergence<D>(g, u);
  const std::vector<double> gdiv = grad_spatial<D>(g, div);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += (mu + lambda) * gdiv[i];
  return out;
}

// Time derivative of (rho, q): upwind convection, central pressure gradient,
// central viscous terms on the vacuum-floored velocity, plus the drag field.
template <int D>
void fluid_rhs(const FluidState<D>& s, std::span<const double> drag,
               const FluidParams& p, std::span<double> drho, std::span<double> dq) {
  const SpatialGrid<D>& g = s.grid;
  std::fill(drho.begin(), drho.end(), 0.0);
  std::fill(dq.begin(), dq.end(), 0.0);
  const std::vector<double> u = s.velocity();
  add_upwind_div<D>(g, s.rho, s.q, u, drho, dq);

  const std::vector<double> P = pressure(s.rho, p.gamma);
  const std::vector<double> gradP = grad_spatial<D>(g, P);
  const std::vector<double> visc = viscous_force<D>(g, u, p.mu, p.lambda);
  for (std::int64_t i = 0; i < g.size; ++i)
    for (int c = 0; c < D; ++c)
      dq[i * D + c] += -gradP[i * D + c] + visc[i * D + c] + drag[i * D + c];
}

}  // namespace detail

// One explicit step of the isentropic compressible flow equations with the
// kinetic drag as a frozen source field, advanced by Heun's method (two Euler
// stages averaged; the convex combination keeps rho >= 0 under the CFL
// contract). A negative density afterwards means the step was too large: the
// step is rejected with a suggested replacement.
template <int D>
FluidState<D> fluid_step(const FluidState<D>& s, std::span<const double> drag,
                         const FluidParams& p, double dt) {
  const std::int64_t n = s.grid.size;
  std::vector<double> drho(static_cast<std::size_t>(n)), dq(static_cast<std::size_t>(n) * D);
  detail::fluid_rhs<D>(s, drag, p, drho, dq);

  FluidState<D> s1 = s;
  for (std::int64_t i = 0; i < n; ++i) {
    s1.rho[i] += dt * drho[i];
    for (int c = 0; c < D; ++c) s1.q[i * D + c] += dt * dq[i * D + c];
  }
  for (std::int64_t i = 0; i < n; ++i)
    if (s1.rho[i] < 0)
      throw TimestepError("negative density after predictor stage (CFL violation)",
                          0.5 * dt);

  std::vector<double> drho2(static_cast<std::size_t>(n)), dq2(static_cast<std::size_t>(n) * D);
  detail::fluid_rhs<D>(s1, drag, p, drho2, dq2);

  FluidState<D> out = s;
  for (std::int64_t i = 0; i < n; ++i) {
    out.rho[i] += 0.5 * dt * (drho[i] + drho2[i]);
    for (int c = 0; c < D; ++c) out.q[i * D + c] += 0.5 * dt * (dq[i * D + c] + dq2[i * D + c]);
  }
  for (std::int64_t i = 0; i < n; ++i)
    if (out.rho[i] < 0)
      throw TimestepError("negative density after corrector stage (CFL violation)",
                          0.5 * dt);
  return out;
}

}  // namespace flocksim
