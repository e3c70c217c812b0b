// SPDX-License-Identifier: Apache-2.0
//
// Finite-difference check of the linearized billiard map.
//
// Two trajectories are launched eps apart along the current tangent vector,
// flown to the middle of the next free flight and differenced. The tangent
// vector is then renormalized and the pair re-seeded, as in the Benettin
// scheme, so the separation stays in the linear regime even when the
// unrenormalized tangent vector grows by many orders of magnitude.

#pragma once

#include <algorithm>
#include <cmath>

#include "c3b/classical.hpp"

namespace oracle {

struct FlightState {
  c3b::Vec2 x;
  c3b::Vec2 v;
};

// Position and velocity after time T; at most one reflection is expected.
inline FlightState fly(const c3b::BoundaryShape& shape, const FlightState& s, double T) {
  FlightState cur = s;
  double left = T;
  for (int guard = 0; guard < 4; ++guard) {
    const auto c = c3b::classical::billiard_step(shape, cur.x, cur.v);
    if (c.flight_time >= left) return {cur.x + left * cur.v, cur.v};
    left -= c.flight_time;
    cur = {c.position, c.velocity};
  }
  return cur;
}

// Largest relative deviation between the tangent map and centered finite
// differences over `collisions` reflections.
inline double tangent_fd_error(const c3b::ArclengthTable& table, double s_frac, double p,
                               int collisions, double eps = 1e-8) {
  using namespace c3b;
  using namespace c3b::classical;
  const BoundaryShape& shape = table.shape();
  auto [xl, vl] = launch(table, {s_frac, p});
  const auto first = billiard_step(shape, xl, vl);
  FlightState base{xl + 0.5 * first.flight_time * vl, vl};

  const Vec2 perp(-vl.y(), vl.x());
  TangentState d{perp / std::sqrt(2.0), perp / std::sqrt(2.0)};
  double worst = 0.0;
  for (int n = 0; n < collisions; ++n) {
    const auto c = billiard_step(shape, base.x, base.v);
    const auto c2 = billiard_step(shape, c.position, c.velocity);
    const double T = c.flight_time + 0.5 * c2.flight_time;
    TangentState lin = tangent_step(d, c.flight_time, c.geometry);
    lin.dq += 0.5 * c2.flight_time * lin.dv;

    const FlightState plus = fly(shape, {base.x + eps * d.dq, (base.v + eps * d.dv).normalized()}, T);
    const FlightState minus = fly(shape, {base.x - eps * d.dq, (base.v - eps * d.dv).normalized()}, T);
    const Vec2 dq = (plus.x - minus.x) / (2 * eps);
    const Vec2 dv = (plus.v - minus.v) / (2 * eps);
    const double err = std::sqrt((dq - lin.dq).squaredNorm() + (dv - lin.dv).squaredNorm()) / lin.norm();
    worst = std::max(worst, err);

    const double norm = lin.norm();
    d = {lin.dq / norm, lin.dv / norm};
    base = {c.position + 0.5 * c2.flight_time * c.velocity, c.velocity};
  }
  return worst;
}

}  // namespace oracle
