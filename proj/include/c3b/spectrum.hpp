// SPDX-License-Identifier: Apache-2.0
//
// Sorted eigen-wavenumbers of one symmetry sector with per-level metadata.

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace c3b {

struct SpectrumEntry {
  double k = 0.0;
  /// ||T(lambda) v|| / ||v||.
  double residual = 0.0;
  double im_k = 0.0;
  int contour_id = 0;
  /// Fundamental node count of the quadrature used for this level.
  std::size_t n_nodes = 0;
};

struct SpectrumRecord {
  double a = 0.0;
  int m = 0;
  double k_lo = 0.0;
  double k_hi = 0.0;
  /// Sorted by k.
  std::vector<SpectrumEntry> entries;
  /// k intervals a contour could not resolve.
  std::vector<std::pair<double, double>> gaps;
  std::map<std::string, std::string> metadata;

  std::size_t size() const noexcept { return entries.size(); }
  std::vector<double> wavenumbers() const;
  /// Levels with k <= k_max.
  SpectrumRecord truncated(double k_max) const;
};

/// Sorts by k and collapses levels closer than `tol` that come from different
/// contours, keeping the contour that found more of them and, on a tie, the
/// smaller residual. Levels closer than `tol` within one contour are genuine
/// degeneracies and are kept. Returns the
/// original index of every surviving entry, in output order.
std::vector<std::size_t> merge_levels(std::vector<SpectrumEntry>& entries, double tol = 1e-8);

}  // namespace c3b
