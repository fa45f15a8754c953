#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "flocksim/alignment.hpp"
#include "flocksim/diagnostics.hpp"
#include "flocksim/errors.hpp"
#include "flocksim/fluid.hpp"
#include "flocksim/kinetic.hpp"
#include "flocksim/state.hpp"

namespace flocksim {

// Full coupled state. The alignment fields must match the kinetic state's
// version at every step boundary; step_coupled maintains this.
template <int D>
struct SimState {
  double t = 0.0;
  std::int64_t step = 0;
  KineticState<D> kin;
  FluidState<D> fl;
  AlignmentFields<D> af;

  bool alignment_fresh() const { return af.version == kin.version; }

  // Alignment force lookup that enforces freshness.
  Vec<D> alignment_force(std::int64_t cell, const Vec<D>& v) const {
    if (!alignment_fresh())
      throw StalenessError("alignment fields are stale (state version " +
                           std::to_string(kin.version) + ", fields version " +
                           std::to_string(af.version) + ")");
    return eval_L<D>(af, cell, v);
  }
};

struct CflPolicy {
  double sigma = 0.4;   // safety factor in (0, 1]
  double max_dt = 1.0;  // hard cap applied after the stability minimum
};

// The candidate terms behind one time-step choice, for error reports.
struct CflBreakdown {
  double acoustic = std::numeric_limits<double>::infinity();
  double transport = std::numeric_limits<double>::infinity();
  double viscous = std::numeric_limits<double>::infinity();
  double exponent = std::numeric_limits<double>::infinity();
  double drag = std::numeric_limits<double>::infinity();
  double dt = 0.0;

  std::string describe() const {
    return "acoustic=" + std::to_string(acoustic) +
           " transport=" + std::to_string(transport) +
           " viscous=" + std::to_string(viscous) +
           " exponent=" + std::to_string(exponent) + " drag=" + std::to_string(drag) +
           " dt=" + std::to_string(dt);
  }
};

// dt = sigma * min( dx / (|u|_inf + c_s),            acoustic transport
//                   dx / R(t),                       kinetic transport
//                   dx^2 rho_min+ / (2 d (2 mu + lambda)),  viscous diffusion
//                   1/2 / max(1 + a),                characteristic exponent
//                   1/2 / max n )                    drag stiffness
// capped by policy.max_dt. Terms with vanishing denominators drop out.
template <int D>
CflBreakdown cfl_dt(const SimState<D>& s, const FluidParams& p, const CflPolicy& policy) {
  CflBreakdown br;
  const SpatialGrid<D>& g = s.fl.grid;
  const double dx = g.min_dx();

  const std::vector<double> u = s.fl.velocity();
  double rho_max = 0.0;
  double rho_min_pos = std::numeric_limits<double>::infinity();
  for (double r : s.fl.rho) {
    rho_max = std::max(rho_max, r);
    if (r > p.eps_vac) rho_min_pos = std::min(rho_min_pos, r);
  }
  const double speed = max_abs_velocity<D>(g, u) + p.sound_speed(rho_max);
  if (speed > 0) br.acoustic = dx / speed;

  const double rad = support_radius<D>(s.kin);
  if (rad > 0) br.transport = dx / rad;

  const double visc_coef = 2.0 * p.mu + p.lambda;
  if (visc_coef > 0 && std::isfinite(rho_min_pos))
    br.viscous = dx * dx * rho_min_pos / (2.0 * D * visc_coef);

  double a_max = 0.0;
  for (double a : s.af.a) a_max = std::max(a_max, a);
  br.exponent = 0.5 / (1.0 + a_max);

  const Moments<D>& mom = s.kin.moments();
  double n_max = 0.0;
  for (double ni : mom.n) n_max = std::max(n_max, ni);
  if (n_max > 0) br.drag = 0.5 / n_max;

  double m = br.acoustic;
  m = std::min(m, br.transport);
  m = std::min(m, br.viscous);
  m = std::min(m, br.exponent);
  m = std::min(m, br.drag);
  br.dt = std::min(policy.sigma * m, policy.max_dt);
  if (!(br.dt > 1e-12))
    throw TimestepError("time step underflow: " + br.describe(), br.dt);
  return br;
}

enum class RunMode { coupled, fluid_only, kinetic_only };

// One Lie-split step: (i) alignment fields refreshed from f if stale,
// (ii) kinetic sub-step with the pre-step fluid velocity, (iii) drag assembled
// from the post-kinetic moments and the pre-step velocity, (iv) fluid
// sub-step, (v) clock advance and alignment rebuild for the next boundary.
//
// fluid_only skips (ii) and kinetic_only skips (iv); with f0 = 0 (resp.
// rho0 = 0) the skipped sub-steps are exact no-ops, so the restricted modes
// reproduce the coupled trajectories bitwise.
template <int D>
SimState<D> step_coupled(const SimState<D>& s, const FluidParams& p,
                         const ConvolutionTable<D>& conv, double dt,
                         RunMode mode = RunMode::coupled) {
  SimState<D> next = s;
  if (!next.alignment_fresh()) next.af = build_alignment<D>(next.kin, conv);

  const std::vector<double> u_pre = next.fl.velocity();
  if (mode != RunMode::fluid_only)
    next.kin = kinetic_step<D>(next.kin, u_pre, next.af, dt);

  if (mode != RunMode::kinetic_only) {
    const std::vector<double> drag = drag_source<D>(next.kin, u_pre);
    next.fl = fluid_step<D>(next.fl, drag, p, dt);
  }

  next.af = build_alignment<D>(next.kin, conv);
  next.t += dt;
  next.step += 1;
  return next;
}

struct FailureReport {
  std::string message;
  double t = 0.0;
  std::int64_t step = 0;
  double monitor = 0.0;  // blowup monitor value at failure
};

struct RunSettings {
  double t_end = 0.0;
  std::int64_t diag_every = 1;
  double monitor_abort = 0.0;  // threshold; <= 0 disables the abort
  RunMode mode = RunMode::coupled;
  WeightParams weights{};
  double r0 = 1.0;       // initial v-support radius for the ceiling column
  int snapshot_count = 0;
};

template <int D>
struct RunResult {
  Trajectory traj;
  SimState<D> final_state;
  std::vector<std::pair<double, SimState<D>>> snapshots;
  std::optional<FailureReport> failure;

  bool ok() const { return !failure.has_value(); }
};

namespace detail {

// Accumulators for the trapezoid integrals on the recording cadence.
struct RunningDiagnostics {
  double e0 = 0.0;
  double viscous_cum = 0.0, friction_cum = 0.0, alignment_cum = 0.0;
  double monitor_integral = 0.0, rho_sup = 0.0;
  double prev_t = 0.0;
  double prev_viscous = 0.0, prev_friction = 0.0, prev_alignment = 0.0;
  double prev_monitor_rate = 0.0;
  bool first = true;
};

template <int D>
DiagnosticsRecord make_record(const SimState<D>& s, const FluidParams& p,
                              const ConvolutionTable<D>& conv, const RunSettings& set,
                              double bound_runmax, RunningDiagnostics& acc) {
  const SpatialGrid<D>& g = s.fl.grid;
  DiagnosticsRecord r;
  r.t = s.t;
  r.mass_f = mass_l1<D>(s.kin);
  r.mass_rho =
      g.cell_volume * pairwise_sum(g.size, [&](std::int64_t i) { return s.fl.rho[i]; });
  r.energy = energy<D>(s.kin, s.fl, p.gamma);

  const std::vector<double> u = s.fl.velocity();
  const double visc = viscous_rate<D>(g, u, p.mu, p.lambda);
  const double fric = friction_rate<D>(s.kin, u);
  const double align = alignment_dissipation<D>(s.kin.moments(), conv);
  const double rho_linf = *std::max_element(s.fl.rho.begin(), s.fl.rho.end());
  const double u_linf = max_abs_velocity<D>(g, u);
  const double gu_linf = max_grad_velocity<D>(g, u);
  const double monitor_rate = u_linf + gu_linf * gu_linf;

  if (acc.first) {
    acc.e0 = r.energy;
    acc.first = false;
  } else {
    const double h = s.t - acc.prev_t;
    acc.viscous_cum += 0.5 * h * (visc + acc.prev_viscous);
    acc.friction_cum += 0.5 * h * (fric + acc.prev_friction);
    acc.alignment_cum += 0.5 * h * (align + acc.prev_alignment);
    acc.monitor_integral += 0.5 * h * (monitor_rate + acc.prev_monitor_rate);
  }
  acc.rho_sup = std::max(acc.rho_sup, rho_linf);
  acc.prev_t = s.t;
  acc.prev_viscous = visc;
  acc.prev_friction = fric;
  acc.prev_alignment = align;
  acc.prev_monitor_rate = monitor_rate;

  r.viscous_cum = acc.viscous_cum;
  r.friction_cum = acc.friction_cum;
  r.alignment_cum = acc.alignment_cum;
  r.energy_residual = r.energy + r.viscous_cum + r.friction_cum + r.alignment_cum - acc.e0;
  r.support_radius = support_radius<D>(s.kin);
  r.support_bound = std::max(set.r0, bound_runmax) + 2.0 * s.kin.grid.max_dv();
  r.f_l2w = weighted_l2<D>(s.kin.grid, s.kin.f, set.weights);
  r.f_h1w = weighted_h1<D>(s.kin.grid, s.kin.f, set.weights);
  r.rho_linf = rho_linf;
  r.u_linf = u_linf;
  r.grad_u_linf = gu_linf;
  r.blowup_monitor = acc.rho_sup + acc.monitor_integral;
  return r;
}

// max over cells of |b(x)| + running input for the support ceiling
template <int D>
double b_plus_u_max(const SimState<D>& s) {
  const SpatialGrid<D>& g = s.fl.grid;
  double bmax = 0.0;
  for (std::int64_t i = 0; i < g.size; ++i) {
    double b2 = 0.0;
    for (int c = 0; c < D; ++c) b2 += s.af.b[i * D + c] * s.af.b[i * D + c];
    bmax = std::max(bmax, b2);
  }
  return std::sqrt(bmax) + max_abs_velocity<D>(g, s.fl.velocity());
}

}  // namespace detail

// Advance the coupled system to t_end, recording diagnostics every
// diag_every-th step (plus the initial and final states). Any sub-step error
// terminates the run with a structured failure report carrying the blowup
// monitor value at failure; so does the optional monitor-abort threshold.
template <int D>
RunResult<D> run(SimState<D> s, const FluidParams& p, const ConvolutionTable<D>& conv,
                 const CflPolicy& policy, const RunSettings& set) {
  RunResult<D> result;
  detail::RunningDiagnostics acc;
  if (!s.alignment_fresh()) s.af = build_alignment<D>(s.kin, conv);

  double bound_runmax = detail::b_plus_u_max<D>(s);
  result.traj.rows.push_back(detail::make_record<D>(s, p, conv, set, bound_runmax, acc));

  int next_snapshot = 1;
  const double t_eps = 1e-12 * std::max(1.0, set.t_end);
  try {
    while (s.t < set.t_end - t_eps) {
      const CflBreakdown br = cfl_dt<D>(s, p, policy);
      const double dt = std::min(br.dt, set.t_end - s.t);
      s = step_coupled<D>(s, p, conv, dt, set.mode);
      bound_runmax = std::max(bound_runmax, detail::b_plus_u_max<D>(s));

      const bool last = s.t >= set.t_end - t_eps;
      if (s.step % set.diag_every == 0 || last) {
        const DiagnosticsRecord row =
            detail::make_record<D>(s, p, conv, set, bound_runmax, acc);
        result.traj.rows.push_back(row);
        if (set.monitor_abort > 0 && row.blowup_monitor > set.monitor_abort) {
          result.failure = FailureReport{
              "blowup monitor " + std::to_string(row.blowup_monitor) +
                  " exceeded the configured threshold " +
                  std::to_string(set.monitor_abort),
              s.t, s.step, row.blowup_monitor};
          break;
        }
      }
      if (set.snapshot_count > 0 &&
          s.t >= next_snapshot * set.t_end / set.snapshot_count - t_eps &&
          next_snapshot <= set.snapshot_count) {
        result.snapshots.emplace_back(s.t, s);
        ++next_snapshot;
      }
    }
  } catch (const Error& e) {
    // extend the accumulators to the last completed state for the report
    const DiagnosticsRecord row = detail::make_record<D>(s, p, conv, set, bound_runmax, acc);
    if (result.traj.rows.empty() || result.traj.rows.back().t != row.t)
      result.traj.rows.push_back(row);
    result.failure = FailureReport{e.what(), s.t, s.step, row.blowup_monitor};
  }

  result.final_state = std::move(s);
  return result;
}

}  // namespace flocksim
