// SPDX-License-Identifier: Apache-2.0
//
// Classical billiard flow inside the C3 boundary, its linearization, and
// finite-time maximal Lyapunov exponents.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "c3b/geometry.hpp"

namespace c3b::classical {

/// Birkhoff coordinates: s / L in [0, 1) and p = sin(alpha), the tangential
/// component of the outgoing unit velocity.
struct PhasePoint {
  double s_frac = 0.0;
  double p = 0.0;
};

/// Linearized offset (dq, dv) of a trajectory.
struct TangentState {
  Vec2 dq = Vec2::Zero();
  Vec2 dv = Vec2::Zero();

  double norm() const { return std::sqrt(dq.squaredNorm() + dv.squaredNorm()); }
};

struct LyapunovResult {
  double lambda_max = 0.0;
  std::size_t collisions = 0;
  double total_time = 0.0;
  /// Jittered restarts after grazing incidence.
  int restarts = 0;
};

/// Local reflection data: outward normal n, curvature, cos(alpha) = v.n of
/// the incoming velocity, and the unit vectors t_i, t_f perpendicular to the
/// incoming and outgoing velocities.
struct ReflectionGeometry {
  Vec2 normal = Vec2::Zero();
  double curvature = 0.0;
  double cos_alpha = 1.0;
  Vec2 t_in = Vec2::Zero();
  Vec2 t_out = Vec2::Zero();
};

struct Collision {
  Vec2 position = Vec2::Zero();
  Vec2 incoming = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double flight_time = 0.0;
  double phi = 0.0;
  ReflectionGeometry geometry;
};

/// |cos(alpha)| below which the reflection is treated as grazing.
inline constexpr double grazing_cutoff = 1e-9;

/// Flies from x (inside) along the unit velocity v to the next boundary
/// intersection and reflects specularly. Throws NumericError when no
/// intersection is found within the flight limit and GrazingError for
/// |cos(alpha)| < grazing_cutoff.
Collision billiard_step(const BoundaryShape& shape, const Vec2& x, const Vec2& v);

/// Free flight followed by the linearized reflection
///   dq <- dq - 2 (dq.n) n
///   dv <- dv - 2 (dv.n) n - (2 kappa / cos alpha) (dq.t_i) t_f.
TangentState tangent_step(const TangentState& state, double flight_time,
                          const ReflectionGeometry& geometry);

/// Interior starting point (offset 1e-12 along the inward normal) and
/// velocity for a boundary phase point.
std::pair<Vec2, Vec2> launch(const ArclengthTable& table, const PhasePoint& point);

/// Birkhoff coordinates of a collision given the arclength table.
PhasePoint birkhoff(const ArclengthTable& table, const Collision& c);

struct LyapunovOptions {
  /// Collisions between renormalizations.
  int renorm_period = 1;
  int max_restarts = 5;
  double jitter = 1e-10;
  std::uint64_t seed = 1;
};

/// Benettin estimate over n_collisions reflections (n_collisions >= 100).
LyapunovResult lyapunov_max(const ArclengthTable& table, const PhasePoint& initial,
                            std::size_t n_collisions, const LyapunovOptions& options = {});

/// Runs until the running estimate changes by less than `tol` (relative) over
/// `window` collisions, with at least `min_collisions` and at most
/// `max_collisions`.
struct StabilizationOptions {
  double tol = 1e-3;
  std::size_t window = 500;
  std::size_t min_collisions = 2000;
  std::size_t max_collisions = 20000;
};
LyapunovResult lyapunov_stabilized(const ArclengthTable& table, const PhasePoint& initial,
                                   const StabilizationOptions& stab,
                                   const LyapunovOptions& options = {});

/// Cells whose trajectory failed permanently.
inline constexpr double heatmap_sentinel = -1.0;

struct Heatmap {
  std::size_t ns = 0;
  std::size_t np = 0;
  /// Row-major, row index over s (cell centers s/L = (i + 1/2) / (3 ns)),
  /// column index over p (p = -1 + (j + 1/2) 2 / np).
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * np + j]; }
  static double s_center(std::size_t i, std::size_t ns, double offset = 0.0);
  static double p_center(std::size_t j, std::size_t np);
  /// Fraction of valid cells with lambda above `threshold`.
  double fraction_above(double threshold) const;
};

/// Lyapunov exponents on the fundamental section s/L in [offset, offset+1/3).
Heatmap lyapunov_heatmap(const ArclengthTable& table, std::size_t ns, std::size_t np,
                         std::size_t n_collisions, int workers = 0, double s_offset = 0.0,
                         const LyapunovOptions& options = {});

/// Default regular/chaotic threshold on lambda_max.
inline constexpr double default_chaos_threshold = 0.05;

struct AverageLyapunov {
  double a = 0.0;
  /// Mean and spread over the chaotic samples.
  double mean = 0.0;
  double stddev = 0.0;
  /// Mean over every drawn initial condition.
  double mean_all = 0.0;
  std::size_t chaotic = 0;
  std::size_t drawn = 0;
};

struct AverageOptions {
  std::size_t samples = 1000;
  double threshold = default_chaos_threshold;
  StabilizationOptions stabilization;
  std::uint64_t seed = 1;
  int workers = 0;
  /// Draw at most this many initial conditions per chaotic sample requested.
  double max_draw_factor = 4.0;
};

/// Mean lambda over `samples` chaotic initial conditions drawn uniformly on
/// the fundamental section, one entry per deformation.
std::vector<AverageLyapunov> average_lyapunov(const std::vector<double>& deformations,
                                              const AverageOptions& options = {});

}  // namespace c3b::classical
