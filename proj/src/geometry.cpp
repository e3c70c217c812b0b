// SPDX-License-Identifier: Apache-2.0
#include "c3b/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "c3b/error.hpp"

namespace c3b {

namespace {

constexpr std::size_t shape_validation_samples = 10000;

double speed_at(const BoundaryShape& shape, double phi) {
  const double r = shape.radius(phi);
  const double dr = shape.radius_d1(phi);
  return std::sqrt(r * r + dr * dr);
}

double integrate_speed(const BoundaryShape& shape, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 21>::integrate(
      [&](double phi) { return speed_at(shape, phi); }, lo, hi, 10, 1e-15);
}

}  // namespace

BoundaryShape::BoundaryShape(double a) : a_(a) {
  if (!(a >= 0.0 && a <= max_deformation)) {
    throw DomainError("deformation a=" + std::to_string(a) + " outside [0, 0.55]");
  }
  min_radius_ = radius(0.0);
  max_radius_ = min_radius_;
  for (std::size_t i = 0; i < shape_validation_samples; ++i) {
    const double r = radius(two_pi * static_cast<double>(i) / shape_validation_samples);
    min_radius_ = std::min(min_radius_, r);
    max_radius_ = std::max(max_radius_, r);
  }
  if (min_radius_ <= 0.0) {
    throw DomainError("boundary radius not positive for a=" + std::to_string(a));
  }
}

double BoundaryShape::radius(double phi) const noexcept {
  return 0.5 * (1.0 + a_ * (std::cos(3.0 * phi) - std::sin(6.0 * phi)));
}

double BoundaryShape::radius_d1(double phi) const noexcept {
  return 0.5 * a_ * (-3.0 * std::sin(3.0 * phi) - 6.0 * std::cos(6.0 * phi));
}

double BoundaryShape::radius_d2(double phi) const noexcept {
  return 0.5 * a_ * (-9.0 * std::cos(3.0 * phi) + 36.0 * std::sin(6.0 * phi));
}

BoundaryPoint boundary_point(const BoundaryShape& shape, double phi) {
  const double r = shape.radius(phi);
  const double dr = shape.radius_d1(phi);
  const double ddr = shape.radius_d2(phi);
  const double c = std::cos(phi);
  const double s = std::sin(phi);

  BoundaryPoint p;
  p.phi = phi;
  p.position = Vec2(r * c, r * s);
  const Vec2 dx(dr * c - r * s, dr * s + r * c);
  const double g = r * r + dr * dr;
  p.speed = std::sqrt(g);
  p.tangent = dx / p.speed;
  p.outward_normal = Vec2(p.tangent.y(), -p.tangent.x());
  p.curvature = (r * r + 2.0 * dr * dr - r * ddr) / (g * p.speed);
  return p;
}

SectorLabel::SectorLabel(int m) : m_(m) {
  if (m < 0 || m > 2) {
    throw DomainError("sector label must be 0, 1 or 2, got " + std::to_string(m));
  }
}

cplx character(SectorLabel m, int ell) {
  const int e = ((m.value() * ell) % 3 + 3) % 3;
  // exact cube roots of unity
  constexpr double h = 0.86602540378443864676;
  switch (e) {
    case 0: return {1.0, 0.0};
    case 1: return {-0.5, -h};
    default: return {-0.5, h};
  }
}

Vec2 rotate(const Vec2& x, int ell) {
  const int e = ((ell % 3) + 3) % 3;
  constexpr double h = 0.86602540378443864676;
  switch (e) {
    case 0: return x;
    case 1: return {-0.5 * x.x() - h * x.y(), h * x.x() - 0.5 * x.y()};
    default: return {-0.5 * x.x() + h * x.y(), -h * x.x() - 0.5 * x.y()};
  }
}

std::pair<Vec2, cplx> rotate_and_character(const Vec2& x, int ell, SectorLabel m) {
  return {rotate(x, ell), character(m, ell)};
}

BoundaryPoint rotate(const BoundaryPoint& p, int ell) {
  BoundaryPoint q = p;
  const int e = ((ell % 3) + 3) % 3;
  q.phi = p.phi + third_turn * e;
  q.position = rotate(p.position, e);
  q.outward_normal = rotate(p.outward_normal, e);
  q.tangent = rotate(p.tangent, e);
  return q;
}

ArclengthTable::ArclengthTable(const BoundaryShape& shape, std::size_t resolution)
    : shape_(shape), resolution_(resolution) {
  if (resolution < 64) {
    throw DomainError("arclength table resolution must be >= 64");
  }
  phi_.resize(resolution + 1);
  s_.resize(resolution + 1);
  s_[0] = 0.0;
  for (std::size_t i = 0; i <= resolution; ++i) {
    phi_[i] = third_turn * static_cast<double>(i) / static_cast<double>(resolution);
  }
  for (std::size_t i = 1; i <= resolution; ++i) {
    s_[i] = s_[i - 1] + integrate_speed(shape_, phi_[i - 1], phi_[i]);
  }
  perimeter_ = 3.0 * s_.back();

  using boost::math::quadrature::gauss_kronrod;
  double a = 0.0;
  for (std::size_t i = 1; i <= resolution; ++i) {
    a += gauss_kronrod<double, 21>::integrate(
        [&](double phi) {
          const double r = shape_.radius(phi);
          return 0.5 * r * r;
        },
        phi_[i - 1], phi_[i], 10, 1e-15);
  }
  area_ = 3.0 * a;
}

double ArclengthTable::arclength(double phi) const {
  const double turns = std::floor(phi / third_turn);
  const double local = phi - turns * third_turn;
  const double h = third_turn / static_cast<double>(resolution_);
  auto i = static_cast<std::size_t>(local / h);
  i = std::min(i, resolution_ - 1);
  const double within = s_[i] + integrate_speed(shape_, phi_[i], local);
  return turns * s_.back() + within;
}

double ArclengthTable::angle_at(double s) const {
  const double sector = s_.back();
  double reduced = std::fmod(s, perimeter_);
  if (reduced < 0.0) reduced += perimeter_;
  const double turns = std::floor(reduced / sector);
  double local = reduced - turns * sector;
  if (local >= sector) local = sector;

  auto it = std::upper_bound(s_.begin(), s_.end(), local);
  std::size_t i = static_cast<std::size_t>(std::distance(s_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, resolution_) - 1;

  // Newton on s(phi) - local within the bracketing table cell
  const double lo = phi_[i];
  const double hi = phi_[i + 1];
  double phi = lo + (hi - lo) * (local - s_[i]) / (s_[i + 1] - s_[i]);
  for (int iter = 0; iter < 30; ++iter) {
    const double f = s_[i] + integrate_speed(shape_, lo, phi) - local;
    const double step = f / speed_at(shape_, phi);
    phi = std::clamp(phi - step, lo, hi);
    if (std::abs(step) < 1e-15) break;
  }
  double out = phi + turns * third_turn;
  if (out >= two_pi) out -= two_pi;
  return out;
}

ArclengthGeometry arclength_geometry(const BoundaryShape& shape, std::size_t resolution) {
  auto table = std::make_shared<const ArclengthTable>(shape, resolution);
  ArclengthGeometry g;
  g.perimeter = table->perimeter();
  g.fundamental_perimeter = table->fundamental_perimeter();
  g.area = table->area();
  g.fundamental_area = table->fundamental_area();
  g.table = std::move(table);
  return g;
}

std::size_t quadrature_node_count(double fundamental_perimeter, double k, double b) {
  const double raw = std::ceil(b * fundamental_perimeter * k / two_pi);
  auto n = static_cast<std::size_t>(std::max(raw, 0.0));
  n = std::max(n, min_quadrature_nodes);
  if (n % 2 != 0) ++n;
  return n;
}

QuadratureSet quadrature_with_count(const ArclengthTable& table, std::size_t n) {
  if (n < 2 || n % 2 != 0) {
    throw DomainError("quadrature node count must be even and positive");
  }
  QuadratureSet q;
  q.fundamental_perimeter = table.fundamental_perimeter();
  q.full_perimeter = table.perimeter();
  q.deformation = table.shape().a();
  q.nodes.reserve(n);
  q.weights.reserve(n);
  const double h = two_pi / static_cast<double>(3 * n);
  for (std::size_t j = 0; j < n; ++j) {
    BoundaryPoint p = boundary_point(table.shape(), h * static_cast<double>(j));
    p.arclength = table.arclength(p.phi);
    q.weights.push_back(h * p.speed);
    q.nodes.push_back(p);
  }
  return q;
}

QuadratureSet quadrature_nodes(const ArclengthTable& table, double k, double b,
                               std::size_t max_nodes) {
  if (!(k > 0.0)) throw DomainError("quadrature wavenumber must be positive");
  if (!(b >= 4.0)) throw DomainError("points per wavelength must be >= 4");
  const std::size_t n = quadrature_node_count(table.fundamental_perimeter(), k, b);
  if (n > max_nodes) {
    throw ResourceError("quadrature needs " + std::to_string(n) +
                        " nodes, above the configured maximum " + std::to_string(max_nodes));
  }
  QuadratureSet q = quadrature_with_count(table, n);
  q.points_per_wavelength = b;
  q.wavenumber = k;
  return q;
}

}  // namespace c3b
