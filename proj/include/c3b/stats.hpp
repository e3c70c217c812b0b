// SPDX-License-Identifier: Apache-2.0
//
// Spectral statistics of an unfolded spectrum: nearest-neighbor spacings,
// the rigidity Delta_3, the number variance Sigma^2 and the saturation of
// Delta_3 with the largest wavenumber in the spectrum.

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "c3b/spectrum.hpp"

namespace c3b::stats {

struct UnfoldedSpectrum {
  std::vector<double> levels;
  /// Staircase fit N(k) = c2 k^2 + c1 k + c0.
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;
  /// c2 * 4 pi / A_fund; NaN when no area was given.
  double weyl_ratio = 0.0;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return levels.size(); }
};

/// Least-squares quadratic fit of n against k_n (n = 1, 2, ...) constrained
/// so that the fit spans exactly size-1 levels between the first and last
/// wavenumber (unit mean spacing). Warns when |weyl_ratio - 1| > 0.05.
/// Requires at least 100 sorted levels.
UnfoldedSpectrum unfold(const std::vector<double>& k, double fundamental_area);
UnfoldedSpectrum unfold(const SpectrumRecord& spectrum, double fundamental_area);

std::vector<double> spacings(const std::vector<double>& levels);

double goe_surmise(double s);
double gue_surmise(double s);
double goe_cdf(double s);
double gue_cdf(double s);
double poisson_cdf(double s);

/// sup |F_n - F| of a sample against a continuous CDF.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

struct Histogram {
  std::vector<double> edges;
  /// Density: counts / (total * width); samples beyond the last edge count in
  /// the total only.
  std::vector<double> density;
};

Histogram histogram(const std::vector<double>& sample, std::size_t bins, double lo, double hi);

struct NnlsResult {
  Histogram histogram;
  double ks_goe = 0.0;
  double ks_gue = 0.0;
  std::size_t count = 0;
  std::vector<std::string> warnings;
};

/// Histogram of s on [0, s_max] and KS distances to both surmises. Fewer
/// than 500 spacings produce a warning.
NnlsResult nnls(const UnfoldedSpectrum& unfolded, std::size_t bins, double s_max = 4.0);

/// Window starts E_0 = E_first + j L/4 with E_0 + L <= E_last.
std::vector<double> window_starts(const std::vector<double>& levels, double L, double stride = 0.0);

/// Mean over windows of min_{A,B} (1/L) int (N - A E - B)^2 dE with the
/// staircase integrals taken exactly. Requires span >= 3 L. `stride` 0 means
/// L/4.
double delta3(const std::vector<double>& levels, double L, double stride = 0.0,
              std::size_t workers = 1);

/// Mean over windows of (N(E_0 + L) - N(E_0) - L)^2.
double sigma2(const std::vector<double>& levels, double L, double stride = 0.0);

/// Delta_3(L) from Sigma^2 through the integral identity
///   Delta_3(L) = 2/L^4 int_0^L (L^3 - 2 L^2 r + r^3) Sigma^2(r) dr,
/// with composite Gauss-Legendre panels no wider than one mean spacing.
double delta3_from_sigma2(const std::vector<double>& levels, double L);

struct RmtLogFit {
  int beta = 1;
  double c = 0.0;
  /// max |Delta_3(L) - (ln L / (beta pi^2) + C)| over the fitted points.
  double max_deviation = 0.0;
};

/// Least-squares C for Delta_3 ~ ln L / (beta pi^2) + C.
RmtLogFit fit_rmt_log(const std::vector<double>& L, const std::vector<double>& delta3_values,
                      int beta);

/// Two-bounce and three-bounce orbit lengths used for L_max.
inline constexpr double two_bounce_length = 1.2415;
inline constexpr double three_bounce_length = 1.6834;

double saturation_length(double fundamental_area, double k_max, double l0 = two_bounce_length);

struct SaturationPoint {
  double k_max = 0.0;
  double l_max = 0.0;
  double delta3_inf = 0.0;
  std::size_t levels = 0;
  /// Plateau grid and values.
  std::vector<double> L;
  std::vector<double> delta3;
  bool still_rising = false;
};

struct SaturationFit {
  std::vector<SaturationPoint> points;
  /// Delta_3^inf = C + ln(k_max^2) / (alpha pi^2).
  double c = 0.0;
  double alpha = 0.0;
  std::vector<std::string> warnings;
};

/// Cuts the spectrum at each k_max, unfolds, and averages Delta_3 over
/// `plateau_points` values of L in [1.2, 2] L_max. Requires at least four
/// distinct cuts.
SaturationFit rigidity_saturation(const std::vector<double>& k, double fundamental_area,
                                  const std::vector<double>& k_max,
                                  std::size_t plateau_points = 9,
                                  double l0 = two_bounce_length);

}  // namespace c3b::stats
