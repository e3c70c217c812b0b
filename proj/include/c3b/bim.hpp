// SPDX-License-Identifier: Apache-2.0
//
// Symmetry-projected boundary integral equation on the fundamental boundary.
//
// For sector m the Fredholm matrix is
//
//     A_ij = 1/2 delta_ij + sum_l conj(chi_m(R^l)) zeta_j K(x_i, R^l x_j)
//
// with K the double-layer kernel. The rotated images R^l x_j of the
// fundamental nodes form the equispaced grid of the whole curve, so the
// logarithmic singularity of K on that periodic grid is integrated with the
// Kress product rule; the plain Nystrom rule is kept as an option.

#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "c3b/geometry.hpp"

namespace c3b::bim {

/// Which normal the kernel differentiates along.
enum class KernelForm {
  /// dG/dn_x: the adjoint double layer. Its null vector is the normal
  /// derivative of the eigenfunction directly.
  normal_at_target,
  /// -(ik/4) n(y).(x-y)/d H1(kd): the classical double layer. Same spectrum.
  normal_at_source,
};

enum class QuadratureRule {
  /// Trapezoidal weights with the Kress correction for the log singularity.
  kress,
  /// Plain Nystrom: zeta_j K(x_i, y_j), diagonal limit kappa/(4 pi).
  plain,
};

struct AssemblyOptions {
  KernelForm form = KernelForm::normal_at_target;
  QuadratureRule rule = QuadratureRule::kress;
  std::size_t max_size = default_max_quadrature_nodes;
};

/// -(ik/4) (n(y).(x-y)/d) H1(kd). When x and y coincide the diagonal limit
/// kappa(x)/(4 pi) is returned if `diagonal_limit` is set; otherwise a
/// DomainError is thrown.
cplx dlp_kernel(const BoundaryPoint& x, const BoundaryPoint& y, cplx k,
                bool diagonal_limit = false);

/// (ik/4) (n(x).(x-y)/d) H1(kd), diagonal limit kappa(x)/(4 pi).
cplx adjoint_dlp_kernel(const BoundaryPoint& x, const BoundaryPoint& y, cplx k,
                        bool diagonal_limit = false);

/// The three image blocks B_l, l = 0,1,2, with (B_l)_ij the quadrature
/// weight of the source R^l x_j seen from target x_i. Every sector matrix is
/// a character-weighted sum of these blocks, so one kernel pass serves all
/// sectors.
struct ImageBlocks {
  cplx k;
  std::array<Eigen::MatrixXcd, 3> blocks;
};

ImageBlocks assemble_blocks(const QuadratureSet& quad, cplx k,
                            const AssemblyOptions& options = {});

struct FredholmMatrix {
  cplx k;
  SectorLabel m;
  std::shared_ptr<const QuadratureSet> quadrature;
  Eigen::MatrixXcd entries;
};

/// 1/2 I + sum_l conj(chi_m(R^l)) B_l.
Eigen::MatrixXcd combine_blocks(const ImageBlocks& blocks, SectorLabel m);

FredholmMatrix assemble_fredholm(std::shared_ptr<const QuadratureSet> quad, SectorLabel m,
                                 cplx k, const AssemblyOptions& options = {});

/// Fredholm matrix of the whole boundary on the 3N-node periodic grid,
/// without symmetry reduction. Node order: fundamental nodes, then their
/// images under R, then under R^2.
Eigen::MatrixXcd assemble_full(const QuadratureSet& quad, cplx k,
                               const AssemblyOptions& options = {});

/// Normal-derivative density on the fundamental nodes.
struct BoundaryFunction {
  Eigen::VectorXcd u;
  double k = 0.0;
  SectorLabel m;
  std::shared_ptr<const QuadratureSet> quadrature;
};

/// Rescales u so that sum zeta_j |u_j|^2 = 1 and fixes the global phase so
/// that the largest-magnitude entry is real and positive.
BoundaryFunction normalized(BoundaryFunction f);

/// Boundary density u on the full grid: u(R^l x_j) = conj(chi_m(R^l)) u_j.
Eigen::VectorXcd extend_to_full(const BoundaryFunction& f);

struct WavefunctionResult {
  std::vector<cplx> values;
  /// Points closer than a tenth of a wavelength to the boundary.
  std::vector<std::size_t> near_boundary;
};

/// psi_m(x) = -sum_l conj(chi_m(R^l)) sum_j zeta_j G_k(x, R^l x_j) u_j with
/// G_k = -(i/4) H0(k|x-y|).
WavefunctionResult reconstruct_wavefunction(const BoundaryFunction& f,
                                            const std::vector<Vec2>& points);

/// The same single-layer representation evaluated on the boundary at polar
/// angles phi that are not quadrature nodes, with the logarithmic singularity
/// integrated by the Kress rule. Vanishes for an eigenfunction.
std::vector<cplx> boundary_trace(const BoundaryFunction& f, const std::vector<double>& phis);

}  // namespace c3b::bim
