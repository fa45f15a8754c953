#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flocksim/alignment.hpp"
#include "flocksim/errors.hpp"
#include "flocksim/fluid.hpp"
#include "flocksim/gradient.hpp"
#include "flocksim/grid.hpp"
#include "flocksim/reduce.hpp"
#include "flocksim/state.hpp"

namespace flocksim {

// Exponents of the phase-space weight
//   omega(x, v) = (1 + v^2)^(2 + beta) * (1 + x^2 + v^2)^alpha
// with x measured from the box center. Requires alpha > 3, beta > 1/2.
struct WeightParams {
  double alpha = 3.5;
  double beta = 1.0;

  WeightParams() = default;
  WeightParams(double a, double b) : alpha(a), beta(b) { validate(); }

  void validate() const {
    if (!(alpha > 3))
      throw ConfigError("alpha = " + std::to_string(alpha) +
                        " violates alpha > 3 (weight exponent)");
    if (!(beta > 0.5))
      throw ConfigError("beta = " + std::to_string(beta) +
                        " violates beta > 1/2 (weight exponent)");
  }
};

template <int D>
double weight_omega(const WeightParams& w, const Vec<D>& x_rel, const Vec<D>& v) {
  const double v2 = norm2<D>(v);
  const double x2 = norm2<D>(x_rel);
  return std::pow(1.0 + v2, 2.0 + w.beta) * std::pow(1.0 + x2 + v2, w.alpha);
}

namespace detail {

template <int D, class F>
double weighted_quadrature(const PhaseGrid<D>& g, const WeightParams& w, const F& f2) {
  const Vec<D> xc = g.space.box_center();
  return g.cell_volume * pairwise_sum(g.size, [&](std::int64_t p) {
           const std::int64_t xi = p / g.v_size;
           const Vec<D> x = g.space.center(xi) - xc;
           const Vec<D> v = g.v_center(p % g.v_size);
           return f2(p) * weight_omega<D>(w, x, v);
         });
}

}  // namespace detail

// | f |_{L^2_omega}: weighted L^2 norm over phase space.
template <int D>
double weighted_l2(const PhaseGrid<D>& g, std::span<const double> f,
                   const WeightParams& w) {
  return std::sqrt(
      detail::weighted_quadrature<D>(g, w, [&](std::int64_t p) { return f[p] * f[p]; }));
}

// | f |_{H^1_omega}^2 = |f|^2 + sum_axis |d_x f|^2 + |d_v f|^2, all weighted.
template <int D>
double weighted_h1(const PhaseGrid<D>& g, std::span<const double> f,
                   const WeightParams& w) {
  double total = detail::weighted_quadrature<D>(
      g, w, [&](std::int64_t p) { return f[p] * f[p]; });
  for (int a = 0; a < D; ++a) {
    const std::vector<double> gx = grad_x_phase<D>(g, f, a);
    total += detail::weighted_quadrature<D>(g, w,
                                            [&](std::int64_t p) { return gx[p] * gx[p]; });
    const std::vector<double> gv = grad_v_phase<D>(g, f, a);
    total += detail::weighted_quadrature<D>(g, w,
                                            [&](std::int64_t p) { return gv[p] * gv[p]; });
  }
  return std::sqrt(total);
}

// Discrete Cauchy-Schwarz constant |omega^{-1/2}|_{L^2} of the phase box; the
// mass bound mass_l1(f) <= C * weighted_l2(f) holds exactly on the grid.
template <int D>
double weight_embedding_constant(const PhaseGrid<D>& g, const WeightParams& w) {
  const Vec<D> xc = g.space.box_center();
  return std::sqrt(g.cell_volume * pairwise_sum(g.size, [&](std::int64_t p) {
                     const Vec<D> x = g.space.center(p / g.v_size) - xc;
                     const Vec<D> v = g.v_center(p % g.v_size);
                     return 1.0 / weight_omega<D>(w, x, v);
                   }));
}

// Total energy of the coupled system:
//   E = integral of (1/2 rho u^2 + P / (gamma - 1)) dx + 1/2 integral f v^2.
template <int D>
double energy(const KineticState<D>& kin, const FluidState<D>& fl, double gamma) {
  const SpatialGrid<D>& g = fl.grid;
  const std::vector<double> u = fl.velocity();
  const double fluid = g.cell_volume * pairwise_sum(g.size, [&](std::int64_t i) {
                         double ke = 0.0;
                         for (int c = 0; c < D; ++c) ke += fl.q[i * D + c] * u[i * D + c];
                         return 0.5 * ke + std::pow(fl.rho[i], gamma) / (gamma - 1.0);
                       });
  const Moments<D>& mom = kin.moments();
  const double kinetic = 0.5 * g.cell_volume *
                         pairwise_sum(g.size, [&](std::int64_t i) { return mom.m2[i]; });
  return fluid + kinetic;
}

// Friction dissipation rate: integral of f (u - v)^2 over phase space, reduced
// to moments: sum over x of [ n u^2 - 2 u . m1 + m2 ].
template <int D>
double friction_rate(const KineticState<D>& kin, std::span<const double> u) {
  const Moments<D>& mom = kin.moments();
  const SpatialGrid<D>& g = kin.grid.space;
  return g.cell_volume * pairwise_sum(g.size, [&](std::int64_t i) {
           double u2 = 0.0, um1 = 0.0;
           for (int c = 0; c < D; ++c) {
             u2 += u[i * D + c] * u[i * D + c];
             um1 += u[i * D + c] * mom.m1[i * D + c];
           }
           return mom.n[i] * u2 - 2.0 * um1 + mom.m2[i];
         });
}

// Viscous dissipation rate mu |grad u|^2_{L^2} + (mu + lambda) |div u|^2_{L^2}.
template <int D>
double viscous_rate(const SpatialGrid<D>& g, std::span<const double> u, double mu,
                    double lambda) {
  const std::vector<double> J = jacobian<D>(g, u);
  const std::vector<double> div = divergence<D>(g, u);
  const double grad2 = g.cell_volume * pairwise_sum(g.size, [&](std::int64_t i) {
                         double s = 0.0;
                         for (int k = 0; k < D * D; ++k)
                           s += J[i * D * D + k] * J[i * D * D + k];
                         return s;
                       });
  const double div2 = g.cell_volume *
                      pairwise_sum(g.size, [&](std::int64_t i) { return div[i] * div[i]; });
  return mu * grad2 + (mu + lambda) * div2;
}

template <int D>
double max_abs_velocity(const SpatialGrid<D>& g, std::span<const double> u) {
  double m = 0.0;
  for (std::int64_t i = 0; i < g.size; ++i) {
    double s = 0.0;
    for (int c = 0; c < D; ++c) s += u[i * D + c] * u[i * D + c];
    if (s > m) m = s;
  }
  return std::sqrt(m);
}

// Max over cells of the Frobenius norm of the velocity Jacobian (dominates the
// operator norm, so the blowup monitor it feeds is conservative).
template <int D>
double max_grad_velocity(const SpatialGrid<D>& g, std::span<const double> u) {
  const std::vector<double> J = jacobian<D>(g, u);
  double m = 0.0;
  for (std::int64_t i = 0; i < g.size; ++i) {
    double s = 0.0;
    for (int k = 0; k < D * D; ++k) s += J[i * D * D + k] * J[i * D * D + k];
    if (s > m) m = s;
  }
  return std::sqrt(m);
}

// One row of the time series. Cumulative entries are trapezoid integrals on
// the recording cadence; `energy_residual` is the defect in the energy
// identity E(t) + cumulative dissipation - E0.
struct DiagnosticsRecord {
  double t = 0;
  double mass_f = 0;
  double mass_rho = 0;
  double energy = 0;
  double viscous_cum = 0;
  double friction_cum = 0;
  double alignment_cum = 0;
  double energy_residual = 0;
  double support_radius = 0;
  double support_bound = 0;
  double f_l2w = 0;
  double f_h1w = 0;
  double rho_linf = 0;
  double u_linf = 0;
  double grad_u_linf = 0;
  double blowup_monitor = 0;

  static const char* csv_header() {
    return "t,mass_f,mass_rho,energy,viscous_cum,friction_cum,alignment_cum,"
           "energy_residual,support_radius,support_bound,f_l2w,f_h1w,rho_linf,"
           "u_linf,grad_u_linf,blowup_monitor";
  }
};

struct Trajectory {
  std::vector<DiagnosticsRecord> rows;
};

// Recomputes the energy-identity defect from recorded columns:
//   residual(t) = E(t) + cum_dissipation(t) - E0
// (raw values; divide by rows[0].energy for the relative version).
inline std::vector<double> energy_identity_residual(const Trajectory& traj) {
  std::vector<double> res;
  if (traj.rows.empty()) return res;
  const double e0 = traj.rows.front().energy;
  res.reserve(traj.rows.size());
  for (const auto& r : traj.rows)
    res.push_back(r.energy + r.viscous_cum + r.friction_cum + r.alignment_cum - e0);
  return res;
}

// Per-row (R(t), ceiling) pairs; the boolean reports whether any step violated
// R(t) <= ceiling(t).
struct SupportBoundReport {
  std::vector<std::pair<double, double>> series;
  bool violated = false;
};

inline SupportBoundReport support_bound_report(const Trajectory& traj) {
  SupportBoundReport rep;
  rep.series.reserve(traj.rows.size());
  for (const auto& r : traj.rows) {
    rep.series.emplace_back(r.support_radius, r.support_bound);
    if (r.support_radius > r.support_bound) rep.violated = true;
  }
  return rep;
}

// Recomputes the blowup monitor series from recorded columns:
//   monitor(t) = running max |rho|_inf + trapezoid of (|u|_inf + |grad u|_inf^2).
inline std::vector<double> blowup_monitor(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.rows.size());
  double rho_sup = 0.0, integral = 0.0, prev_rate = 0.0, prev_t = 0.0;
  bool first = true;
  for (const auto& r : traj.rows) {
    const double rate = r.u_linf + r.grad_u_linf * r.grad_u_linf;
    if (first) {
      first = false;
    } else {
      integral += 0.5 * (r.t - prev_t) * (rate + prev_rate);
    }
    rho_sup = std::max(rho_sup, r.rho_linf);
    out.push_back(rho_sup + integral);
    prev_rate = rate;
    prev_t = r.t;
  }
  return out;
}

// Residual of the initial-data compatibility relation: with
//   G = mu lap(u0) + (mu + lambda) grad(div u0) - grad P(rho0) + (m1 - n u0)
// returns the L^2 norm of G / sqrt(rho0) over non-vacuum cells and the max |G|
// over vacuum cells (well-prepared data keeps the latter small).
struct CompatibilityResidual {
  double l2_weighted = 0.0;
  double vacuum_max = 0.0;
};

template <int D>
CompatibilityResidual compatibility_residual(const KineticState<D>& f0,
                                             const FluidState<D>& fl0,
                                             const FluidParams& p) {
  const SpatialGrid<D>& g = fl0.grid;
  const std::vector<double> u0 = fl0.velocity();
  const std::vector<double> visc = detail::viscous_force<D>(g, u0, p.mu, p.lambda);
  const std::vector<double> P = pressure(fl0.rho, p.gamma);
  const std::vector<double> gradP = grad_spatial<D>(g, P);
  const std::vector<double> drag = drag_source<D>(f0, u0);

  CompatibilityResidual res;
  double w2 = 0.0;
  for (std::int64_t i = 0; i < g.size; ++i) {
    double g2 = 0.0;
    for (int c = 0; c < D; ++c) {
      const double Gc = visc[i * D + c] - gradP[i * D + c] + drag[i * D + c];
      g2 += Gc * Gc;
    }
    if (fl0.rho[i] > p.eps_vac) {
      w2 += g2 / fl0.rho[i] * g.cell_volume;
    } else {
      res.vacuum_max = std::max(res.vacuum_max, std::sqrt(g2));
    }
  }
  res.l2_weighted = std::sqrt(w2);
  return res;
}

}  // namespace flocksim
