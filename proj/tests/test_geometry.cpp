// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "c3b/error.hpp"
#include "c3b/geometry.hpp"

using namespace c3b;

namespace {

constexpr double pi = std::numbers::pi;

Vec2 curve(const BoundaryShape& s, double phi) {
  const double r = 0.5 * (1.0 + s.a() * (std::cos(3 * phi) - std::sin(6 * phi)));
  return {r * std::cos(phi), r * std::sin(phi)};
}

// Curvature from five-point differences of the parametrized curve.
double fd_curvature(const BoundaryShape& s, double phi, double h = 1e-3) {
  const Vec2 a = curve(s, phi - 2 * h), b = curve(s, phi - h), c = curve(s, phi);
  const Vec2 d = curve(s, phi + h), e = curve(s, phi + 2 * h);
  const Vec2 d1 = (a - 8 * b + 8 * d - e) / (12 * h);
  const Vec2 d2 = (-a + 16 * b - 30 * c + 16 * d - e) / (12 * h * h);
  return (d1.x() * d2.y() - d1.y() * d2.x()) / std::pow(d1.norm(), 3);
}

// Composite Simpson over [0, 2 pi] with n intervals.
template <class F>
double simpson(F f, int n) {
  const double h = 2 * pi / n;
  double s = f(0.0) + f(2 * pi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(Geometry, DirectSubstitution) {
  BoundaryShape s(0.2);
  const auto p = boundary_point(s, 0.0);
  EXPECT_NEAR(s.radius(0.0), 0.6, 1e-15);
  EXPECT_NEAR(p.position.x(), 0.6, 1e-15);
  EXPECT_NEAR(p.position.y(), 0.0, 1e-15);
}

TEST(Geometry, CircleCase) {
  BoundaryShape s(0.0);
  for (double phi : {0.0, 0.3, 1.7, 4.0}) {
    const auto p = boundary_point(s, phi);
    EXPECT_DOUBLE_EQ(s.radius(phi), 0.5);
    EXPECT_NEAR(p.curvature, 2.0, 1e-14);
    EXPECT_NEAR((p.outward_normal - p.position.normalized()).norm(), 0.0, 1e-14);
  }
}

TEST(Geometry, CurvatureMatchesFiniteDifferences) {
  BoundaryShape s(0.2);
  EXPECT_NEAR(boundary_point(s, pi / 6).curvature, fd_curvature(s, pi / 6), 1e-6);
  for (double phi = 0.05; phi < 2 * pi; phi += 0.37)
    EXPECT_NEAR(boundary_point(s, phi).curvature, fd_curvature(s, phi), 1e-6) << phi;
}

TEST(Geometry, NormalIsUnitAndOrthogonal) {
  BoundaryShape s(0.45);
  for (double phi = 0.0; phi < 2 * pi; phi += 0.1) {
    const auto p = boundary_point(s, phi);
    EXPECT_NEAR(p.outward_normal.norm(), 1.0, 1e-12);
    EXPECT_NEAR(p.outward_normal.dot(p.tangent), 0.0, 1e-12);
    // outward: the normal points away from the origin-containing interior
    EXPECT_GT(p.outward_normal.dot(p.position), 0.0);
  }
}

TEST(Geometry, RejectsInvalidAmplitude) {
  EXPECT_THROW(BoundaryShape(-0.01), DomainError);
  EXPECT_THROW(BoundaryShape(0.56), DomainError);
  EXPECT_THROW(BoundaryShape(std::nan("")), DomainError);
  EXPECT_NO_THROW(BoundaryShape(0.55));
}

TEST(Geometry, RadiusHasThreeFoldSymmetry) {
  BoundaryShape s(0.3);
  for (double phi = -3.0; phi < 7.0; phi += 0.173)
    EXPECT_NEAR(s.radius(phi + third_turn), s.radius(phi), 1e-15);
}

TEST(Geometry, RotationMapsBoundaryPoints) {
  BoundaryShape s(0.2);
  for (double phi = 0.0; phi < 2 * pi; phi += 0.41) {
    for (int l = 1; l <= 2; ++l) {
      const auto r = rotate(boundary_point(s, phi), l);
      const auto q = boundary_point(s, phi + l * third_turn);
      EXPECT_NEAR((r.position - q.position).norm(), 0.0, 1e-12);
      EXPECT_NEAR((r.outward_normal - q.outward_normal).norm(), 0.0, 1e-12);
      EXPECT_NEAR(r.curvature, q.curvature, 1e-12);
    }
  }
}

TEST(Geometry, RotationHasOrderThree) {
  const Vec2 x(0.3, -0.2);
  EXPECT_NEAR((rotate(rotate(rotate(x, 1), 1), 1) - x).norm(), 0.0, 1e-15);
  EXPECT_NEAR((rotate(x, 3) - x).norm(), 0.0, 1e-15);
}

TEST(Geometry, Characters) {
  const auto [y, chi] = rotate_and_character(Vec2(1, 0), 1, SectorLabel(1));
  EXPECT_NEAR(std::abs(chi - std::polar(1.0, -2 * pi / 3)), 0.0, 1e-15);
  EXPECT_NEAR(y.x(), -0.5, 1e-15);
  for (int l = 0; l < 3; ++l) EXPECT_EQ(character(SectorLabel(0), l), cplx(1.0));
  for (int m = 0; m < 3; ++m)
    for (int mp = 0; mp < 3; ++mp) {
      cplx s = 0;
      for (int l = 0; l < 3; ++l)
        s += character(SectorLabel(m), l) * std::conj(character(SectorLabel(mp), l));
      EXPECT_NEAR(std::abs(s / 3.0 - (m == mp ? 1.0 : 0.0)), 0.0, 1e-15);
    }
  EXPECT_THROW(SectorLabel(3), DomainError);
  EXPECT_EQ(SectorLabel(1).conjugate(), SectorLabel(2));
}

TEST(Geometry, CircleArclength) {
  const auto g = arclength_geometry(BoundaryShape(0.0));
  EXPECT_NEAR(g.perimeter, pi, 1e-13);
  EXPECT_NEAR(g.area, pi / 4, 1e-13);
  EXPECT_NEAR(g.fundamental_area, pi / 12, 1e-13);
}

TEST(Geometry, AreaAndPerimeterOracle) {
  BoundaryShape s(0.2);
  const double area = simpson([&](double p) { return 0.5 * std::pow(s.radius(p), 2); }, 20000);
  const double len = simpson(
      [&](double p) { return std::hypot(s.radius(p), s.radius_d1(p)); }, 20000);
  // closed form of (1/2) oint r^2 dphi
  EXPECT_NEAR(area, pi * (1 + 0.04) / 4, 1e-12);
  const auto g = arclength_geometry(s);
  EXPECT_NEAR(g.area, area, 1e-12);
  EXPECT_NEAR(g.fundamental_area, 0.27227, 5e-6);
  EXPECT_NEAR(g.perimeter, len, 1e-10);
  EXPECT_NEAR(g.fundamental_perimeter, len / 3, 1e-10);
}

TEST(Geometry, ArclengthConverges) {
  BoundaryShape s(0.4);
  const double l1 = arclength_geometry(s, 128).perimeter;
  const double l2 = arclength_geometry(s, 256).perimeter;
  const double l3 = arclength_geometry(s, 512).perimeter;
  EXPECT_LT(std::abs(l3 - l2) / l3, 1e-10);
  EXPECT_LE(std::abs(l3 - l2), std::abs(l2 - l1) + 1e-15);
}

TEST(Geometry, ArclengthInverse) {
  ArclengthTable t(BoundaryShape(0.3));
  for (double phi = 0.01; phi < 2 * pi; phi += 0.29) {
    EXPECT_NEAR(t.angle_at(t.arclength(phi)), phi, 1e-12);
  }
  EXPECT_NEAR(t.arclength(third_turn), t.fundamental_perimeter(), 1e-12);
  EXPECT_NEAR(t.arclength(2 * pi), t.perimeter(), 1e-12);
}

TEST(Geometry, QuadratureWeightsSumToFundamentalPerimeter) {
  ArclengthTable t(BoundaryShape(0.2));
  const auto q = quadrature_nodes(t, 100.0, 10.0);
  double sum = 0;
  for (double w : q.weights) sum += w;
  EXPECT_NEAR(sum / t.fundamental_perimeter(), 1.0, 1e-10);
  const auto expect = static_cast<std::size_t>(std::ceil(10 * t.fundamental_perimeter() * 100 / (2 * pi)));
  EXPECT_GE(q.size(), expect);
  EXPECT_LE(q.size(), expect + 1);
  EXPECT_EQ(q.size() % 2, 0u);
}

TEST(Geometry, QuadratureFloorAndCap) {
  ArclengthTable t(BoundaryShape(0.2));
  EXPECT_EQ(quadrature_nodes(t, 1.0, 10.0).size(), 64u);
  EXPECT_THROW(quadrature_nodes(t, 1e5, 10.0, 4000), ResourceError);
  EXPECT_THROW(quadrature_nodes(t, 10.0, 3.0), DomainError);
}
