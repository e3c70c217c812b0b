// SPDX-License-Identifier: Apache-2.0
#include "c3b/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "c3b/error.hpp"
#include "c3b/parallel.hpp"
#include "c3b/random.hpp"

namespace c3b::classical {

namespace {

constexpr double launch_offset = 1e-12;
constexpr double min_march_step = 1e-6;
constexpr double newton_zone = 1e-3;
constexpr double newton_max_step = 1e-2;
constexpr double newton_min_slope = 0.05;
// about ten times the round-off in evaluating F
constexpr double root_tol = 2e-15;

// F(t) = |x + t v| - r(theta) and its t-derivative. The angular harmonics
// come from the point coordinates directly, without atan2.
struct RayFunction {
  const BoundaryShape& shape;
  Vec2 x;
  Vec2 v;

  std::pair<double, double> eval(double t) const {
    const Vec2 p = x + t * v;
    const double rho = p.norm();
    if (rho == 0.0) return {-shape.radius(0.0), 1.0};
    const double c = p.x() / rho;
    const double s = p.y() / rho;
    const double c3 = c * (4.0 * c * c - 3.0);
    const double s3 = s * (3.0 - 4.0 * s * s);
    const double s6 = 2.0 * s3 * c3;
    const double c6 = 2.0 * c3 * c3 - 1.0;
    const double a = shape.a();
    const double r = 0.5 * (1.0 + a * (c3 - s6));
    const double dr = 0.5 * a * (-3.0 * s3 - 6.0 * c6);
    const double dtheta = (p.x() * v.y() - p.y() * v.x()) / (rho * rho);
    const double drho = p.dot(v) / rho;
    return {rho - r, drho - dr * dtheta};
  }
};

// Refines a bracket with F(lo) < 0 <= F(hi); returns a point on the inner
// side with |F| below root_tol.
double polish(const RayFunction& f, double lo, double flo, double hi) {
  double ft = flo;
  for (int iter = 0; iter < 200; ++iter) {
    if (-ft <= root_tol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    const double slope = f.eval(lo).second;
    double next = slope > 0.0 ? lo - ft / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double fn = f.eval(next).first;
    if (fn < 0.0) {
      lo = next;
      ft = fn;
    } else {
      hi = next;
    }
  }
  return lo;
}

double find_collision(const BoundaryShape& shape, const Vec2& x, const Vec2& v) {
  const RayFunction f{shape, x, v};
  const double limit = 2.5 * shape.max_radius();
  const double slope_bound = shape.max_radius_slope();
  const double inner = 0.5 * shape.min_radius();
  double t = 0.0;
  auto [ft, dft] = f.eval(t);
  if (ft >= 0.0) {
    throw DomainError("ray start is not inside the billiard");
  }
  for (int iter = 0; iter < 1000000; ++iter) {
    if (t > limit) break;
    const double rho = (x + t * v).norm();
    if (-ft < newton_zone && dft > newton_min_slope) {
      if (-ft <= root_tol) return t;
      const double step = std::min(-ft / dft, newton_max_step);
      if (step <= 4.0 * std::numeric_limits<double>::epsilon() * t) return t;
      const double fn = f.eval(t + step).first;
      if (fn >= 0.0) return polish(f, t, ft, t + step);
      t += step;
      std::tie(ft, dft) = f.eval(t);
      continue;
    }
    double step;
    if (rho < inner) {
      step = inner;
    } else {
      const double lipschitz = 1.0 + slope_bound / (0.5 * rho);
      step = std::min(-ft / lipschitz, 0.5 * rho);
    }
    if (step < min_march_step) {
      step = min_march_step;
      const double fn = f.eval(t + step).first;
      if (fn >= 0.0) return polish(f, t, ft, t + step);
    }
    t += step;
    std::tie(ft, dft) = f.eval(t);
  }
  throw NumericError("no boundary intersection within the flight limit");
}

}  // namespace

Collision billiard_step(const BoundaryShape& shape, const Vec2& x, const Vec2& v) {
  const double t = find_collision(shape, x, v);
  Collision c;
  c.flight_time = t;
  c.position = x + t * v;
  c.incoming = v;
  c.phi = std::atan2(c.position.y(), c.position.x());
  if (c.phi < 0.0) c.phi += two_pi;
  const BoundaryPoint bp = boundary_point(shape, c.phi);
  const Vec2& n = bp.outward_normal;
  const double cn = v.dot(n);
  if (std::abs(cn) < grazing_cutoff) {
    throw GrazingError("grazing incidence at phi=" + std::to_string(c.phi));
  }
  c.velocity = v - 2.0 * cn * n;
  c.velocity.normalize();
  const double sn = v.dot(bp.tangent);
  c.geometry.normal = n;
  c.geometry.curvature = bp.curvature;
  c.geometry.cos_alpha = cn;
  c.geometry.t_in = cn * bp.tangent - sn * n;
  c.geometry.t_out = sn * n + cn * bp.tangent;
  return c;
}

TangentState tangent_step(const TangentState& state, double flight_time,
                          const ReflectionGeometry& g) {
  if (std::abs(g.cos_alpha) < grazing_cutoff) throw GrazingError("grazing tangent reflection");
  TangentState out;
  const Vec2 dq = state.dq + flight_time * state.dv;
  const Vec2& n = g.normal;
  out.dq = dq - 2.0 * dq.dot(n) * n;
  out.dv = state.dv - 2.0 * state.dv.dot(n) * n -
           (2.0 * g.curvature / g.cos_alpha) * dq.dot(g.t_in) * g.t_out;
  return out;
}

std::pair<Vec2, Vec2> launch(const ArclengthTable& table, const PhasePoint& point) {
  if (!(point.p > -1.0 && point.p < 1.0)) throw DomainError("p must lie in (-1, 1)");
  const double phi = table.angle_at(point.s_frac * table.perimeter());
  const BoundaryPoint bp = boundary_point(table.shape(), phi);
  const Vec2 inward = -bp.outward_normal;
  const Vec2 x = bp.position + launch_offset * inward;
  Vec2 v = std::sqrt(1.0 - point.p * point.p) * inward + point.p * bp.tangent;
  v.normalize();
  return {x, v};
}

PhasePoint birkhoff(const ArclengthTable& table, const Collision& c) {
  PhasePoint out;
  out.s_frac = table.arclength(c.phi) / table.perimeter();
  out.s_frac -= std::floor(out.s_frac);
  out.p = c.velocity.dot(Vec2(-c.geometry.normal.y(), c.geometry.normal.x()));
  return out;
}

namespace {

// One Benettin run; stop(n, estimate) returns true to end after n collisions.
template <class Stop>
LyapunovResult benettin(const ArclengthTable& table, const PhasePoint& initial,
                        const LyapunovOptions& options, std::size_t cap, Stop stop) {
  if (options.renorm_period < 1) throw DomainError("renormalization period must be >= 1");
  PhasePoint start = initial;
  auto engine = stream_engine(options.seed, {0x6a77u});
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int attempt = 0;; ++attempt) {
    try {
      auto [x, v] = launch(table, start);
      const Vec2 perp(-v.y(), v.x());
      TangentState state{perp / std::numbers::sqrt2, perp / std::numbers::sqrt2};
      double log_sum = 0.0;
      double time = 0.0;
      std::size_t n = 0;
      while (n < cap) {
        const Collision c = billiard_step(table.shape(), x, v);
        state = tangent_step(state, c.flight_time, c.geometry);
        time += c.flight_time;
        x = c.position;
        v = c.velocity;
        ++n;
        if (n % static_cast<std::size_t>(options.renorm_period) == 0) {
          const double norm = state.norm();
          log_sum += std::log(norm);
          state.dq /= norm;
          state.dv /= norm;
        }
        if (stop(n, (log_sum + std::log(state.norm())) / time)) break;
      }
      log_sum += std::log(state.norm());
      LyapunovResult r;
      r.lambda_max = log_sum / time;
      r.collisions = n;
      r.total_time = time;
      r.restarts = attempt;
      return r;
    } catch (const GrazingError&) {
      if (attempt >= options.max_restarts) throw;
      start.s_frac += options.jitter * unit(engine);
      start.s_frac -= std::floor(start.s_frac);
      start.p = std::clamp(start.p * (1.0 + options.jitter * unit(engine)), -1.0 + 1e-15, 1.0 - 1e-15);
    }
  }
}

}  // namespace

LyapunovResult lyapunov_max(const ArclengthTable& table, const PhasePoint& initial,
                            std::size_t n_collisions, const LyapunovOptions& options) {
  if (n_collisions < 100) throw DomainError("at least 100 collisions required");
  return benettin(table, initial, options, n_collisions,
                  [](std::size_t, double) { return false; });
}

LyapunovResult lyapunov_stabilized(const ArclengthTable& table, const PhasePoint& initial,
                                   const StabilizationOptions& stab,
                                   const LyapunovOptions& options) {
  if (stab.window == 0 || stab.max_collisions < stab.min_collisions) {
    throw DomainError("invalid stabilization window");
  }
  std::vector<double> history;
  history.reserve(stab.max_collisions / stab.window + 1);
  return benettin(table, initial, options, stab.max_collisions,
                  [&](std::size_t n, double estimate) {
                    if (n % stab.window != 0) return false;
                    history.push_back(estimate);
                    if (n < stab.min_collisions || history.size() < 2) return false;
                    const double prev = history[history.size() - 2];
                    return std::abs(estimate - prev) <= stab.tol * std::abs(estimate);
                  });
}

double Heatmap::s_center(std::size_t i, std::size_t ns, double offset) {
  return offset + (static_cast<double>(i) + 0.5) / (3.0 * static_cast<double>(ns));
}

double Heatmap::p_center(std::size_t j, std::size_t np) {
  return -1.0 + (static_cast<double>(j) + 0.5) * 2.0 / static_cast<double>(np);
}

double Heatmap::fraction_above(double threshold) const {
  std::size_t valid = 0, above = 0;
  for (double v : values) {
    if (v == heatmap_sentinel) continue;
    ++valid;
    if (v > threshold) ++above;
  }
  return valid == 0 ? 0.0 : static_cast<double>(above) / static_cast<double>(valid);
}

Heatmap lyapunov_heatmap(const ArclengthTable& table, std::size_t ns, std::size_t np,
                         std::size_t n_collisions, int workers, double s_offset,
                         const LyapunovOptions& options) {
  if (ns == 0 || np == 0) throw DomainError("heatmap needs a non-empty grid");
  Heatmap h;
  h.ns = ns;
  h.np = np;
  h.values.assign(ns * np, heatmap_sentinel);
  parallel_for(ns * np, resolve_workers(workers), [&](std::size_t cell) {
    const std::size_t i = cell / np;
    const std::size_t j = cell % np;
    PhasePoint pp{Heatmap::s_center(i, ns, s_offset), Heatmap::p_center(j, np)};
    LyapunovOptions opt = options;
    opt.seed = options.seed ^ (0x9e3779b97f4a7c15ull * (cell + 1));
    try {
      h.values[cell] = lyapunov_max(table, pp, n_collisions, opt).lambda_max;
    } catch (const NumericError&) {
      h.values[cell] = heatmap_sentinel;
    }
  });
  return h;
}

std::vector<AverageLyapunov> average_lyapunov(const std::vector<double>& deformations,
                                              const AverageOptions& options) {
  std::vector<AverageLyapunov> out;
  const std::size_t workers = resolve_workers(options.workers);
  const auto max_draws =
      static_cast<std::size_t>(options.max_draw_factor * static_cast<double>(options.samples));
  for (std::size_t idx = 0; idx < deformations.size(); ++idx) {
    const ArclengthTable table(BoundaryShape(deformations[idx]));
    AverageLyapunov avg;
    avg.a = deformations[idx];
    std::vector<double> chaotic;
    std::size_t drawn = 0;
    double valid_sum = 0.0;
    std::size_t valid_count = 0;
    while (chaotic.size() < options.samples && drawn < max_draws) {
      const std::size_t batch = std::min(options.samples, max_draws - drawn);
      std::vector<double> lambda(batch, heatmap_sentinel);
      parallel_for(batch, workers, [&](std::size_t b) {
        const std::size_t draw = drawn + b;
        auto engine = stream_engine(options.seed, {idx, draw});
        std::uniform_real_distribution<double> us(0.0, 1.0 / 3.0);
        std::uniform_real_distribution<double> up(-1.0, 1.0);
        PhasePoint pp{us(engine), up(engine)};
        LyapunovOptions lo;
        lo.seed = options.seed + draw;
        try {
          lambda[b] = lyapunov_stabilized(table, pp, options.stabilization, lo).lambda_max;
        } catch (const NumericError&) {
          lambda[b] = heatmap_sentinel;
        }
      });
      for (double l : lambda) {
        if (l != heatmap_sentinel) {
          valid_sum += l;
          ++valid_count;
        }
        if (l != heatmap_sentinel && l > options.threshold && chaotic.size() < options.samples) {
          chaotic.push_back(l);
        }
      }
      drawn += batch;
    }
    avg.drawn = drawn;
    avg.mean_all = valid_count == 0 ? 0.0 : valid_sum / static_cast<double>(valid_count);
    avg.chaotic = chaotic.size();
    if (!chaotic.empty()) {
      double sum = 0.0;
      for (double l : chaotic) sum += l;
      avg.mean = sum / static_cast<double>(chaotic.size());
      double var = 0.0;
      for (double l : chaotic) var += (l - avg.mean) * (l - avg.mean);
      avg.stddev = chaotic.size() > 1 ? std::sqrt(var / static_cast<double>(chaotic.size() - 1)) : 0.0;
    }
    out.push_back(avg);
  }
  return out;
}

}  // namespace c3b::classical
