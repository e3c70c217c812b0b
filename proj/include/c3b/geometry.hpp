// SPDX-License-Identifier: Apache-2.0
//
// Boundary of the three-fold rotationally symmetric billiard
//
//     r(phi) = 1/2 (1 + a (cos 3phi - sin 6phi)),   a in [0, 0.55],
//
// its differential geometry, the C3 group action, and the boundary
// discretization used by the integral-equation solver.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include <Eigen/Core>

namespace c3b {

using Vec2 = Eigen::Vector2d;
using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double third_turn = two_pi / 3.0;

/// Largest deformation amplitude accepted by BoundaryShape.
inline constexpr double max_deformation = 0.55;

/// Deformation of the C3 billiard. Construction validates the amplitude and
/// checks that r(phi) stays positive on a dense sample.
class BoundaryShape {
public:
  explicit BoundaryShape(double a);

  double a() const noexcept { return a_; }

  /// r(phi) and its first two derivatives.
  double radius(double phi) const noexcept;
  double radius_d1(double phi) const noexcept;
  double radius_d2(double phi) const noexcept;

  /// Upper bound of |r'(phi)|.
  double max_radius_slope() const noexcept { return 4.5 * a_; }
  /// Sampled minimum of r(phi).
  double min_radius() const noexcept { return min_radius_; }
  /// Sampled maximum of r(phi).
  double max_radius() const noexcept { return max_radius_; }

private:
  double a_;
  double min_radius_ = 0.0;
  double max_radius_ = 0.0;
};

struct BoundaryPoint {
  double phi = 0.0;
  Vec2 position = Vec2::Zero();
  Vec2 outward_normal = Vec2::Zero();
  /// Unit tangent in the counter-clockwise direction.
  Vec2 tangent = Vec2::Zero();
  double curvature = 0.0;
  /// |dx/dphi|.
  double speed = 0.0;
  /// Arclength from phi = 0; NaN when produced without an arclength table.
  double arclength = std::numeric_limits<double>::quiet_NaN();
};

/// Local geometry at polar angle phi from the analytic derivatives of r.
BoundaryPoint boundary_point(const BoundaryShape& shape, double phi);

/// One-dimensional irreducible representation of C3, m in {0, 1, 2}.
class SectorLabel {
public:
  constexpr SectorLabel() = default;
  explicit SectorLabel(int m);

  constexpr int value() const noexcept { return m_; }
  /// m = 0 is the real (self-conjugate) sector.
  constexpr bool is_real() const noexcept { return m_ == 0; }
  /// Time-reversal partner (1 <-> 2).
  SectorLabel conjugate() const { return SectorLabel((3 - m_) % 3); }

  friend constexpr bool operator==(SectorLabel, SectorLabel) = default;

private:
  int m_ = 0;
};

/// chi_m(R^ell) = exp(-2 pi i m ell / 3).
cplx character(SectorLabel m, int ell);

/// Rotation by 2 pi ell / 3 (ell taken modulo 3).
Vec2 rotate(const Vec2& x, int ell);

/// Rotated point and the character chi_m(R^ell).
std::pair<Vec2, cplx> rotate_and_character(const Vec2& x, int ell, SectorLabel m);

/// Image of a boundary point under R^ell: position, normal and tangent are
/// rotated, the polar angle advances by 2 pi ell / 3, curvature is unchanged.
BoundaryPoint rotate(const BoundaryPoint& p, int ell);

/// Arclength parameterization of the full boundary, computed once per shape.
/// s(phi) is tabulated at `resolution` equispaced angles per symmetry sector;
/// phi(s) is recovered by binary search plus Newton refinement.
class ArclengthTable {
public:
  ArclengthTable(const BoundaryShape& shape, std::size_t resolution = 256);

  const BoundaryShape& shape() const noexcept { return shape_; }

  /// Total perimeter L and enclosed area A.
  double perimeter() const noexcept { return perimeter_; }
  double area() const noexcept { return area_; }
  /// Fundamental-domain values L/3 and A/3.
  double fundamental_perimeter() const noexcept { return perimeter_ / 3.0; }
  double fundamental_area() const noexcept { return area_ / 3.0; }

  /// Arclength from phi = 0 measured counter-clockwise; phi may be any real.
  double arclength(double phi) const;
  /// Inverse map; s is reduced modulo L and the result lies in [0, 2 pi).
  double angle_at(double s) const;

  std::size_t resolution() const noexcept { return resolution_; }

private:
  BoundaryShape shape_;
  std::size_t resolution_;
  std::vector<double> phi_;
  std::vector<double> s_;  // cumulative arclength over one sector [0, 2pi/3]
  double perimeter_ = 0.0;
  double area_ = 0.0;
};

/// Geometry summary returned by arclength_geometry().
struct ArclengthGeometry {
  std::shared_ptr<const ArclengthTable> table;
  double perimeter = 0.0;
  double fundamental_perimeter = 0.0;
  double area = 0.0;
  double fundamental_area = 0.0;
};

ArclengthGeometry arclength_geometry(const BoundaryShape& shape, std::size_t resolution = 256);

/// Default discretization density (points per wavelength).
inline constexpr double default_points_per_wavelength = 10.0;
/// Smallest number of nodes on the fundamental boundary.
inline constexpr std::size_t min_quadrature_nodes = 64;
/// Default cap on the fundamental node count.
inline constexpr std::size_t default_max_quadrature_nodes = 4000;

/// Nodes and weights on the fundamental boundary phi in [0, 2pi/3).
///
/// Nodes are equispaced in the polar angle, phi_j = 2 pi j / (3 N), so their
/// three rotated images form the equispaced periodic grid of the full curve.
/// The weights are the periodic trapezoidal weights zeta_j = (2pi/3N)|x'(phi_j)|.
struct QuadratureSet {
  std::vector<BoundaryPoint> nodes;
  std::vector<double> weights;
  double points_per_wavelength = default_points_per_wavelength;
  double wavenumber = 0.0;
  double fundamental_perimeter = 0.0;
  double full_perimeter = 0.0;
  /// Deformation a of the shape the nodes were taken from.
  double deformation = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }
  /// Node count of the full (unreduced) periodic grid.
  std::size_t full_size() const noexcept { return 3 * nodes.size(); }
  /// Parameter step 2 pi / (3N).
  double step() const noexcept { return two_pi / static_cast<double>(full_size()); }
};

/// Node count used for wavenumber k: ceil(b L_fund k / 2pi), at least 64,
/// rounded up to an even number.
std::size_t quadrature_node_count(double fundamental_perimeter, double k, double b);

QuadratureSet quadrature_nodes(const ArclengthTable& table, double k,
                               double b = default_points_per_wavelength,
                               std::size_t max_nodes = default_max_quadrature_nodes);

/// Equispaced quadrature with an explicit node count (must be even).
QuadratureSet quadrature_with_count(const ArclengthTable& table, std::size_t n);

}  // namespace c3b
