// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstring>

#include <gtest/gtest.h>

#include "c3b/beyn.hpp"
#include "c3b/error.hpp"
#include "oracles.hpp"

using namespace c3b;

namespace {

Eigen::MatrixXcd shifted_diagonal(const std::vector<double>& d, cplx z) {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d.size()),
                                               static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i] - z;
  return t;
}

}  // namespace

TEST(Beyn, DiagonalMomentsFromResidues) {
  const std::vector<double> d{1.0, 2.0, 3.0};
  beyn::MatrixFamily T = [&](cplx z) { return shifted_diagonal(d, z); };
  beyn::Contour c{cplx(1.5, 0.0), 1.0, 80, 0.8};
  const auto V = beyn::probe_matrix(3, 3, 7, {0});
  const auto mom = beyn::contour_moments(T, c, V);
  // T^-1 = -sum e e^T / (z - lambda): residues give -P V with P the
  // projector on the enclosed eigenvectors.
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(3, 3);
  expect.row(0) = -V.row(0);
  expect.row(1) = -V.row(1);
  EXPECT_LT((mom.a0 - expect).norm(), 1e-10);
  Eigen::MatrixXcd expect1 = expect;
  expect1.row(1) *= 2.0;
  EXPECT_LT((mom.a1 - expect1).norm(), 1e-10);

  beyn::ProbeConfig cfg;
  const auto res = beyn::reduce_and_solve(mom, T, c, cfg);
  ASSERT_EQ(res.rank, 2u);
  ASSERT_EQ(res.eigenvalues.size(), 2u);
  EXPECT_NEAR(std::abs(res.eigenvalues[0] - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(res.eigenvalues[1] - 2.0), 0.0, 1e-12);
  EXPECT_TRUE(res.kept[0] && res.kept[1]);
}

TEST(Beyn, NodesAvoidTheRealAxis) {
  beyn::Contour c{cplx(10.0, 0.0), 0.5, 50, 0.8};
  for (int j = 0; j < c.nodes; ++j) EXPECT_GT(std::abs(c.node(j).imag()), 1e-3);
  cplx s = 0;
  for (int j = 0; j < c.nodes; ++j) s += c.weight(j) / (c.node(j) - c.center);
  EXPECT_NEAR(std::abs(s - 1.0), 0.0, 1e-14);
}

TEST(Beyn, FullRankIsAmbiguous) {
  std::vector<double> d;
  for (int i = 1; i <= 10; ++i) d.push_back(i);
  beyn::MatrixFamily T = [&](cplx z) { return shifted_diagonal(d, z); };
  beyn::Contour c{cplx(5.5, 0.0), 5.0, 200, 0.8};
  const auto V = beyn::probe_matrix(10, 3, 1, {0});
  const auto mom = beyn::contour_moments(T, c, V);
  EXPECT_THROW(beyn::reduce_and_solve(mom, T, c, {}), AmbiguousRankError);
}

TEST(Beyn, EmptyContourHasRankZero) {
  const std::vector<double> d{1.0, 2.0, 3.0};
  beyn::MatrixFamily T = [&](cplx z) { return shifted_diagonal(d, z); };
  beyn::Contour c{cplx(5.0, 0.0), 0.5, 50, 0.8};
  const auto mom = beyn::contour_moments(T, c, beyn::probe_matrix(3, 2, 1, {0}));
  EXPECT_EQ(beyn::reduce_and_solve(mom, T, c, {}).rank, 0u);
}

TEST(Beyn, CircleGroundStateContour) {
  const double exact = 2.0 * oracle::bessel_zeros(0, 3.0).at(0);
  const ArclengthTable table{BoundaryShape(0.0)};
  const auto q = std::make_shared<QuadratureSet>(quadrature_nodes(table, 5.2));
  beyn::MatrixFamily T = [&](cplx z) { return bim::assemble_fredholm(q, SectorLabel(0), z).entries; };
  beyn::Contour c{cplx(4.8, 0.0), 0.4, 50, 0.8};
  const auto V = beyn::probe_matrix(static_cast<Eigen::Index>(q->size()), 8, 1, {0});
  const auto res = beyn::reduce_and_solve(beyn::contour_moments(T, c, V), T, c, {});
  ASSERT_EQ(res.eigenvalues.size(), 1u);
  EXPECT_NEAR(res.eigenvalues[0].real(), exact, 1e-9);
  EXPECT_LT(res.residuals[0], 1e-9);
}

TEST(Beyn, CircleWindowIsComplete) {
  beyn::WindowPolicy p;
  p.workers = 1;
  const auto res = beyn::solve_window_sectors(
      BoundaryShape(0.0), {SectorLabel(0), SectorLabel(1), SectorLabel(2)}, 4.0, 20.0, p);
  for (int m = 0; m < 3; ++m) {
    const auto expect = oracle::circle_levels(m, 4.0, 20.0);
    const auto got = res[static_cast<std::size_t>(m)].record.wavenumbers();
    ASSERT_EQ(got.size(), expect.size()) << "m=" << m;
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expect[i], 1e-8);
  }
  // m = 1 and m = 2 form degenerate doublets
  const auto a = res[1].record.wavenumbers(), b = res[2].record.wavenumbers();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
}

TEST(Beyn, RefiningTheQuadratureMovesLittle) {
  const double exact = 2.0 * oracle::bessel_zeros(4, 9.0).at(0);
  beyn::WindowPolicy coarse, fine;
  coarse.workers = fine.workers = 1;
  fine.points_per_wavelength = 14.0;
  const auto a = beyn::solve_window(BoundaryShape(0.0), SectorLabel(1), exact - 0.3, exact + 0.3, coarse);
  const auto b = beyn::solve_window(BoundaryShape(0.0), SectorLabel(1), exact - 0.3, exact + 0.3, fine);
  ASSERT_EQ(a.record.size(), 1u);
  ASSERT_EQ(b.record.size(), 1u);
  EXPECT_LT(std::abs(a.record.entries[0].k - b.record.entries[0].k), 1e-9);
}

TEST(Beyn, WindowTilesCoverTheRange) {
  beyn::WindowPolicy p;
  const auto tiles = beyn::window_tiles(0.27227, 5.0, 40.0, p);
  ASSERT_FALSE(tiles.empty());
  EXPECT_LE(tiles.front().first, 5.0);
  EXPECT_GE(tiles.back().second, 40.0);
  for (std::size_t i = 1; i < tiles.size(); ++i) EXPECT_LE(tiles[i].first, tiles[i - 1].second);
  EXPECT_THROW(beyn::window_tiles(0.27227, 5.0, 5.0, p), DomainError);
}

TEST(Beyn, WorkerCountDoesNotChangeBits) {
  beyn::WindowPolicy p1, p2;
  p1.workers = 1;
  p2.workers = 2;
  const auto a = beyn::solve_window(BoundaryShape(0.2), SectorLabel(0), 20.0, 23.0, p1);
  const auto b = beyn::solve_window(BoundaryShape(0.2), SectorLabel(0), 20.0, 23.0, p2);
  ASSERT_EQ(a.record.size(), b.record.size());
  for (std::size_t i = 0; i < a.record.size(); ++i) {
    EXPECT_EQ(std::memcmp(&a.record.entries[i].k, &b.record.entries[i].k, sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&a.record.entries[i].residual, &b.record.entries[i].residual, sizeof(double)), 0);
  }
}

TEST(Beyn, DeduplicationKeepsDegeneracies) {
  std::vector<SpectrumEntry> e{{5.0, 1e-12, 0, 0, 64}, {5.0 + 1e-10, 1e-13, 0, 1, 64},
                               {7.0, 1e-12, 0, 1, 64}, {7.0 + 1e-11, 1e-12, 0, 1, 64}};
  const auto idx = merge_levels(e, 1e-8);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(idx[0], 1u);
  EXPECT_EQ(e[1].k, 7.0);
}
