#pragma once

#include <cmath>
#include <string>

#include "flocksim/errors.hpp"
#include "flocksim/vec.hpp"

namespace flocksim {

// Result of tracing one characteristic backward over a step: the departure
// point (x_b, v_b) and the phase-volume amplification J picked up along the
// way. J = exp(d * (1 + a) * dt) >= 1, and dt = 0 gives the identity.
template <int D>
struct CharTrace {
  Vec<D> x_b{};
  Vec<D> v_b{};
  double jac = 1.0;
};

// Exact backward solve of the frozen-coefficient characteristic system
//   X' = V,   V' = (b + u) - (1 + a) V
// for the trajectory arriving at (x, v) after time dt. With lam = 1 + a and
// c = (b + u) / lam the velocity relaxes toward c, so backward in time
//   v_b = c + (v - c) e^(lam dt)
//   x_b = x - [ c dt + (v - c)(e^(lam dt) - 1) / lam ]
// The exponent lam * dt is capped at 30 to keep J = e^(D lam dt) finite.
template <int D>
CharTrace<D> trace_back(const Vec<D>& x, const Vec<D>& v, double a_loc,
                        const Vec<D>& b_loc, const Vec<D>& u_loc, double dt) {
  if (a_loc < 0) throw ArgumentError("trace_back needs a >= 0");
  if (dt < 0) throw ArgumentError("trace_back needs dt >= 0");
  const double lam = 1.0 + a_loc;
  if (lam * dt > 30.0)
    throw TimestepError("characteristic exponent (1 + a) dt = " +
                            std::to_string(lam * dt) + " would overflow",
                        0.5 / lam);

  const double em1 = std::expm1(lam * dt);  // e^(lam dt) - 1, exact at dt = 0
  CharTrace<D> r;
  for (int c = 0; c < D; ++c) {
    const double cc = (b_loc[c] + u_loc[c]) / lam;
    const double dev = v[c] - cc;
    r.v_b[c] = cc + dev * (1.0 + em1);
    r.x_b[c] = x[c] - (cc * dt + dev * em1 / lam);
  }
  r.jac = std::exp(static_cast<double>(D) * lam * dt);
  return r;
}

}  // namespace flocksim
