// SPDX-License-Identifier: Apache-2.0
//
// Poincare-Husimi functions of symmetry-reduced boundary functions and the
// localization statistics built on them.
//
// The coherent state at (q, p) is the periodized Gaussian
//   c(s) = (k/pi)^(1/4) sum_w exp(-k/2 (s - q + wL)^2 - i k p (s - q + wL)),
// and the sector amplitude is
//   <c|u> = sum_l conj(chi_m(R^l)) int_fund c*(s(R^l y)) u(y) ds(y).

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "c3b/bim.hpp"
#include "c3b/classical.hpp"

namespace c3b::phasespace {

enum class Section {
  /// q in [0, L/3)
  fundamental,
  /// q in [0, L)
  full,
};

struct HusimiGrid {
  std::size_t nq = 0;
  std::size_t np = 0;
  double q_max = 0.0;
  double k = 0.0;
  SectorLabel m;
  /// Row-major over q, normalized to unit sum.
  std::vector<double> values;
  std::vector<std::string> warnings;

  double at(std::size_t i, std::size_t j) const { return values[i * np + j]; }
  double q_center(std::size_t i) const;
  double p_center(std::size_t j) const;
};

struct GridDims {
  std::size_t nq = 0;
  std::size_t np = 0;
};

/// Nq = ceil(section_length k / 2 pi), Np = ceil(Nq / 2), each at least 16
/// and at most the caps.
GridDims default_grid_dims(double section_length, double k, std::size_t max_q = 400,
                           std::size_t max_p = 200);

struct HusimiOptions {
  Section section = Section::fundamental;
  /// Periodic images |w| <= max_winding.
  int max_winding = 2;
};

/// Requires dims >= 16 and a boundary function with quadrature.
HusimiGrid husimi_sector(const bim::BoundaryFunction& u, std::size_t nq, std::size_t np,
                         const HusimiOptions& options = {});

struct Localization {
  double entropy = 0.0;
  double a = 0.0;
  double r_ipr = 0.0;
};

/// S = -sum h ln h, A = exp(S) / N_eff, R = 1 / (N_c sum h^2).
Localization localization_measures(const std::vector<double>& grid, double n_eff, double n_c);
Localization localization_measures(const HusimiGrid& grid);

/// Number of Husimi cells of the fundamental section whose nearest
/// Lyapunov-heatmap cell exceeds `threshold`.
std::size_t chaotic_cells(const classical::Heatmap& map, double threshold, std::size_t nq,
                          std::size_t np);

struct BetaFit {
  double alpha = 0.0;
  double beta = 0.0;
  double a0 = 1.0;
  double sigma = 0.0;
  std::size_t sample_count = 0;
  std::size_t excluded = 0;
  int iterations = 0;

  /// Location of the density maximum; NaN unless alpha, beta > 1.
  double mode() const;
};

/// sigma = A0 sqrt(alpha beta / ((alpha+beta)^2 (alpha+beta+1))).
double beta_sigma(double alpha, double beta, double a0);

struct BetaFitOptions {
  /// Samples below this percentile are dropped as regular or mixed tails.
  double tail_percentile = 2.0;
  /// A0 = min(1, a0_factor * max sample) unless fixed_a0 > 0.
  double a0_factor = 1.02;
  double fixed_a0 = 0.0;
  int max_iterations = 200;
};

/// Maximum-likelihood Beta fit of t = A / A0 by Newton iteration on
/// (ln alpha, ln beta) from the moment estimate. Requires 200 samples after
/// the tail cut; throws NumericError if the iteration does not converge.
BetaFit beta_fit(std::vector<double> samples, const BetaFitOptions& options = {});

struct ScalingFit {
  double gamma = 0.0;
  double c = 0.0;
  std::vector<double> k;
  std::vector<double> sigma;
  std::vector<double> residuals;
};

/// log10 sigma = C - gamma log10 k by ordinary least squares. Requires four
/// points spanning a factor of two in k.
ScalingFit scaling_fit(const std::vector<double>& k, const std::vector<double>& sigma);

}  // namespace c3b::phasespace
