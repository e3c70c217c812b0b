// SPDX-License-Identifier: Apache-2.0
//
// Contour-integral eigensolver for analytic matrix families T(z).
//
// For a circle Gamma the moments
//
//     A_p = (2 pi i)^-1  oint z^p T(z)^-1 V dz,   p = 0, 1,
//
// are approximated with the trapezoidal rule. A thin SVD of A_0 truncated at
// its numerical rank r gives B = U^H A_1 W Sigma^-1, whose eigenvalues are the
// eigenvalues of T inside Gamma.
//
// The nodes sit at half-integer angles, z_j = k0 + R exp(2 pi i (j + 1/2) / N),
// so that no node lands on the real axis where the spectrum lives.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "c3b/bim.hpp"
#include "c3b/geometry.hpp"
#include "c3b/spectrum.hpp"

namespace c3b::beyn {

struct Contour {
  cplx center;
  double radius = 0.5;
  int nodes = 50;
  double keep_fraction = 0.8;

  cplx node(int j) const;
  /// Trapezoidal weight of node j for (2 pi i)^-1 oint f dz.
  cplx weight(int j) const;
};

struct ProbeConfig {
  std::size_t columns = 0;
  std::uint64_t seed = 1;
  double rank_tol = 1e-10;
  /// Singular values below noise_floor * ||V||_F are round-off even when
  /// sigma_1 is itself round-off (no eigenvalue inside).
  double noise_floor = 1e-12;
  double residual_tol = 1e-6;
  double im_tol = 1e-6;
  /// When positive, sigma_r / sigma_{r+1} below this raises AmbiguousRankError.
  double min_rank_gap = 0.0;
};

struct MomentPair {
  Eigen::MatrixXcd a0;
  Eigen::MatrixXcd a1;
  /// Frobenius norm of the probe matrix.
  double probe_norm = 1.0;
};

struct EigenResult {
  std::vector<cplx> eigenvalues;
  std::vector<double> residuals;
  /// Right eigenvectors, one column per eigenvalue.
  Eigen::MatrixXcd vectors;
  std::vector<bool> kept;
  int contour_id = 0;
  std::size_t rank = 0;
  Eigen::VectorXd singular_values;
};

using MatrixFamily = std::function<Eigen::MatrixXcd(cplx)>;

/// Complex standard normal entries (E|v|^2 = 1) from the stream (seed, stream).
Eigen::MatrixXcd probe_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                              std::initializer_list<std::uint64_t> stream);

/// Trapezoidal moments; node solves run on up to `workers` threads and are
/// summed in node order.
MomentPair contour_moments(const MatrixFamily& T, const Contour& contour,
                           const Eigen::MatrixXcd& V, std::size_t workers = 1);

/// Moments for several matrix families that share one evaluation per node
/// (the sectors of one billiard). T returns one matrix per probe block.
std::vector<MomentPair> contour_moments_shared(
    const std::function<std::vector<Eigen::MatrixXcd>(cplx)>& T, const Contour& contour,
    const std::vector<Eigen::MatrixXcd>& probes, std::size_t workers = 1);

/// Rank reduction, eigenvalues of B, eigenvectors, residuals from a fresh
/// evaluation of T at each eigenvalue inside the contour (NaN outside), and
/// the keep filter. Throws AmbiguousRankError if A_0 has full numerical rank.
EigenResult reduce_and_solve(const MomentPair& moments, const MatrixFamily& T,
                             const Contour& contour, const ProbeConfig& config,
                             int contour_id = 0);

/// Settings for chaining contours along the real axis.
struct WindowPolicy {
  int nodes = 50;
  double max_radius = 0.5;
  double keep_fraction = 0.8;
  /// Relative overlap of neighboring keep regions.
  double overlap = 0.01;
  double max_per_contour = 150.0;
  double points_per_wavelength = default_points_per_wavelength;
  std::size_t max_quadrature_nodes = default_max_quadrature_nodes;
  double probe_factor = 1.2;
  std::size_t probe_extra = 10;
  std::uint64_t seed = 1;
  double rank_tol = 1e-10;
  double noise_floor = 1e-12;
  double residual_tol = 1e-6;
  double im_tol = 1e-6;
  double min_rank_gap = 0.0;
  double dedupe_tol = 1e-8;
  /// Times a failing contour may be split in halves.
  int max_splits = 3;
  double k_floor = 2.0;
  bool keep_vectors = false;
  int workers = 0;
  bim::AssemblyOptions assembly;
};

struct WindowResult {
  SpectrumRecord record;
  /// Normalized boundary functions aligned with record.entries (only with
  /// keep_vectors).
  std::vector<bim::BoundaryFunction> states;
};

/// Tiling of [k_lo, k_hi] into keep intervals of width
/// 2 keep_fraction R (1 - overlap).
std::vector<std::pair<double, double>> window_tiles(double fundamental_area, double k_lo,
                                                    double k_hi, const WindowPolicy& policy);

WindowResult solve_window(const BoundaryShape& shape, SectorLabel m, double k_lo, double k_hi,
                          const WindowPolicy& policy);

/// Several sectors in one sweep; the kernel is assembled once per node and
/// shared. Each sector's result equals what solve_window returns for it.
std::vector<WindowResult> solve_window_sectors(const BoundaryShape& shape,
                                               const std::vector<SectorLabel>& sectors,
                                               double k_lo, double k_hi,
                                               const WindowPolicy& policy);

}  // namespace c3b::beyn
