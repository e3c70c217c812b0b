// SPDX-License-Identifier: Apache-2.0
#include "c3b/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace c3b {

std::vector<double> SpectrumRecord::wavenumbers() const {
  std::vector<double> k;
  k.reserve(entries.size());
  for (const auto& e : entries) k.push_back(e.k);
  return k;
}

SpectrumRecord SpectrumRecord::truncated(double k_max) const {
  SpectrumRecord r = *this;
  r.entries.clear();
  for (const auto& e : entries) {
    if (e.k <= k_max) r.entries.push_back(e);
  }
  r.k_hi = std::min(k_hi, k_max);
  return r;
}

std::vector<std::size_t> merge_levels(std::vector<SpectrumEntry>& entries, double tol) {
  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = entries[a];
    const auto& y = entries[b];
    if (x.k != y.k) return x.k < y.k;
    return x.contour_id < y.contour_id;
  });
  std::vector<std::size_t> kept;
  kept.reserve(entries.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && entries[order[j]].k - entries[order[j - 1]].k < tol) ++j;
    // cluster [i, j): keep the contour that resolved the most levels, then the
    // one with the best worst-case residual
    int best = entries[order[i]].contour_id;
    std::size_t best_count = 0;
    double best_res = std::numeric_limits<double>::infinity();
    for (std::size_t c = i; c < j; ++c) {
      const int id = entries[order[c]].contour_id;
      double worst = 0.0;
      std::size_t count = 0;
      for (std::size_t d = i; d < j; ++d) {
        if (entries[order[d]].contour_id != id) continue;
        worst = std::max(worst, entries[order[d]].residual);
        ++count;
      }
      const bool better = count > best_count ||
                          (count == best_count && (worst < best_res || (worst == best_res && id < best)));
      if (better) {
        best_count = count;
        best_res = worst;
        best = id;
      }
    }
    for (std::size_t c = i; c < j; ++c) {
      if (entries[order[c]].contour_id == best) kept.push_back(order[c]);
    }
    i = j;
  }
  std::vector<SpectrumEntry> out;
  out.reserve(kept.size());
  for (std::size_t idx : kept) out.push_back(entries[idx]);
  entries = std::move(out);
  return kept;
}

}  // namespace c3b
