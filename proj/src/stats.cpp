// SPDX-License-Identifier: Apache-2.0
#include "c3b/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "c3b/error.hpp"
#include "c3b/parallel.hpp"

namespace c3b::stats {

namespace {

constexpr double pi = std::numbers::pi;

void require_sorted(const std::vector<double>& x, const char* what) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] >= x[i - 1])) throw DomainError(std::string(what) + ": levels must be sorted");
}

}  // namespace

UnfoldedSpectrum unfold(const std::vector<double>& k, double fundamental_area) {
  if (k.size() < 100) throw DomainError("unfold: at least 100 levels are required");
  require_sorted(k, "unfold");
  const std::size_t n = k.size();
  const double k1 = k.front();
  const double span = k.back() - k1;
  if (!(span > 0.0)) throw DomainError("unfold: degenerate spectrum");

  // In t = (k - k1)/span the fit is b2 t^2 + b1 t + b0 with b2 + b1 = n - 1,
  // leaving a two-parameter problem for (b2, b0).
  const double total = static_cast<double>(n - 1);
  double s_xx = 0, s_x = 0, s_xy = 0, s_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (k[i] - k1) / span;
    const double x = t * t - t;
    const double y = static_cast<double>(i + 1) - total * t;
    s_xx += x * x;
    s_x += x;
    s_xy += x * y;
    s_y += y;
  }
  const double nn = static_cast<double>(n);
  const double det = s_xx * nn - s_x * s_x;
  const double b2 = (s_xy * nn - s_x * s_y) / det;
  const double b0 = (s_xx * s_y - s_x * s_xy) / det;
  const double b1 = total - b2;

  UnfoldedSpectrum out;
  out.levels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (k[i] - k1) / span;
    out.levels[i] = (b2 * t + b1) * t + b0;
  }
  out.c2 = b2 / (span * span);
  out.c1 = b1 / span - 2.0 * b2 * k1 / (span * span);
  out.c0 = b2 * k1 * k1 / (span * span) - b1 * k1 / span + b0;
  if (fundamental_area > 0.0) {
    out.weyl_ratio = out.c2 * 4.0 * pi / fundamental_area;
    if (std::abs(out.weyl_ratio - 1.0) > 0.05)
      out.warnings.push_back("staircase fit deviates from the Weyl area term by more than 5%");
  } else {
    out.weyl_ratio = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

UnfoldedSpectrum unfold(const SpectrumRecord& spectrum, double fundamental_area) {
  return unfold(spectrum.wavenumbers(), fundamental_area);
}

std::vector<double> spacings(const std::vector<double>& levels) {
  std::vector<double> s;
  if (levels.size() < 2) return s;
  s.reserve(levels.size() - 1);
  for (std::size_t i = 1; i < levels.size(); ++i) s.push_back(levels[i] - levels[i - 1]);
  return s;
}

double goe_surmise(double s) { return s < 0 ? 0.0 : 0.5 * pi * s * std::exp(-0.25 * pi * s * s); }

double gue_surmise(double s) {
  return s < 0 ? 0.0 : 32.0 / (pi * pi) * s * s * std::exp(-4.0 * s * s / pi);
}

double goe_cdf(double s) { return s <= 0 ? 0.0 : -std::expm1(-0.25 * pi * s * s); }

double gue_cdf(double s) {
  if (s <= 0) return 0.0;
  return std::erf(2.0 * s / std::sqrt(pi)) - 4.0 * s / pi * std::exp(-4.0 * s * s / pi);
}

double poisson_cdf(double s) { return s <= 0 ? 0.0 : -std::expm1(-s); }

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

Histogram histogram(const std::vector<double>& sample, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw DomainError("histogram: bad range");
  Histogram h;
  const double w = (hi - lo) / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + w * static_cast<double>(b);
  h.density.assign(bins, 0.0);
  for (double x : sample) {
    if (x < lo || x >= hi) continue;
    auto b = static_cast<std::size_t>((x - lo) / w);
    h.density[std::min(b, bins - 1)] += 1.0;
  }
  const double norm = sample.empty() ? 1.0 : static_cast<double>(sample.size()) * w;
  for (double& d : h.density) d /= norm;
  return h;
}

NnlsResult nnls(const UnfoldedSpectrum& unfolded, std::size_t bins, double s_max) {
  NnlsResult r;
  const auto s = spacings(unfolded.levels);
  if (s.empty()) throw DomainError("nnls: need at least two levels");
  r.count = s.size();
  if (r.count < 500) r.warnings.push_back("fewer than 500 spacings; KS distances are noisy");
  r.histogram = histogram(s, bins, 0.0, s_max);
  r.ks_goe = ks_distance(s, goe_cdf);
  r.ks_gue = ks_distance(s, gue_cdf);
  return r;
}

std::vector<double> window_starts(const std::vector<double>& levels, double L, double stride) {
  if (!(L > 0.0)) throw DomainError("window length must be positive");
  if (stride <= 0.0) stride = 0.25 * L;
  std::vector<double> out;
  if (levels.size() < 2) return out;
  const double first = levels.front();
  const double last = levels.back();
  for (std::size_t j = 0;; ++j) {
    const double e0 = first + stride * static_cast<double>(j);
    if (e0 + L > last) break;
    out.push_back(e0);
  }
  return out;
}

namespace {

// min_{A,B} (1/L) int_0^L (N(x) - A x - B)^2 dx for the staircase of the
// levels in (e0, e0 + L].
double window_delta3(const std::vector<double>& levels, double e0, double L) {
  auto it = std::upper_bound(levels.begin(), levels.end(), e0);
  double i0 = 0, i1 = 0, i2 = 0;
  double x_prev = 0.0;
  double count = 0.0;
  for (; it != levels.end() && *it <= e0 + L; ++it) {
    const double x = *it - e0;
    i0 += count * (x - x_prev);
    i1 += count * 0.5 * (x * x - x_prev * x_prev);
    i2 += count * count * (x - x_prev);
    x_prev = x;
    count += 1.0;
  }
  i0 += count * (L - x_prev);
  i1 += count * 0.5 * (L * L - x_prev * x_prev);
  i2 += count * count * (L - x_prev);
  const double s0 = L, s1 = 0.5 * L * L, s2 = L * L * L / 3.0;
  const double det = s2 * s0 - s1 * s1;
  const double a = (s0 * i1 - s1 * i0) / det;
  const double b = (s2 * i0 - s1 * i1) / det;
  return std::max(0.0, (i2 - a * i1 - b * i0) / L);
}

}  // namespace

double delta3(const std::vector<double>& levels, double L, double stride, std::size_t workers) {
  require_sorted(levels, "delta3");
  if (levels.size() < 2 || levels.back() - levels.front() < 3.0 * L)
    throw DomainError("delta3: spectrum span must be at least 3 L");
  const auto starts = window_starts(levels, L, stride);
  // fixed blocks summed in order keep the result independent of `workers`
  constexpr std::size_t block = 256;
  const std::size_t nblocks = (starts.size() + block - 1) / block;
  std::vector<double> partial(nblocks, 0.0);
  parallel_for(nblocks, workers, [&](std::size_t b) {
    double acc = 0.0;
    const std::size_t end = std::min(starts.size(), (b + 1) * block);
    for (std::size_t j = b * block; j < end; ++j) acc += window_delta3(levels, starts[j], L);
    partial[b] = acc;
  });
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum / static_cast<double>(starts.size());
}

double sigma2(const std::vector<double>& levels, double L, double stride) {
  require_sorted(levels, "sigma2");
  const auto starts = window_starts(levels, L, stride);
  if (starts.empty()) throw DomainError("sigma2: spectrum shorter than the window");
  // two pointers: lo = first index with E > e0, hi = first index with E > e0 + L
  std::size_t lo = 0, hi = 0;
  double sum = 0.0;
  for (double e0 : starts) {
    while (lo < levels.size() && levels[lo] <= e0) ++lo;
    while (hi < levels.size() && levels[hi] <= e0 + L) ++hi;
    const double d = static_cast<double>(hi - lo) - L;
    sum += d * d;
  }
  return sum / static_cast<double>(starts.size());
}

double delta3_from_sigma2(const std::vector<double>& levels, double L) {
  using rule = boost::math::quadrature::gauss<double, 10>;
  const auto panels = static_cast<std::size_t>(std::ceil(L));
  const double h = L / static_cast<double>(panels);
  double integral = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = h * static_cast<double>(p);
    integral += rule::integrate(
        [&](double r) {
          return (L * L * L - 2.0 * L * L * r + r * r * r) * sigma2(levels, r);
        },
        a, a + h);
  }
  return 2.0 / (L * L * L * L) * integral;
}

RmtLogFit fit_rmt_log(const std::vector<double>& L, const std::vector<double>& values, int beta) {
  if (L.size() != values.size() || L.empty()) throw DomainError("fit_rmt_log: size mismatch");
  if (beta != 1 && beta != 2) throw DomainError("fit_rmt_log: beta must be 1 or 2");
  RmtLogFit fit;
  fit.beta = beta;
  const double slope = 1.0 / (beta * pi * pi);
  double sum = 0.0;
  for (std::size_t i = 0; i < L.size(); ++i) sum += values[i] - slope * std::log(L[i]);
  fit.c = sum / static_cast<double>(L.size());
  for (std::size_t i = 0; i < L.size(); ++i)
    fit.max_deviation =
        std::max(fit.max_deviation, std::abs(values[i] - slope * std::log(L[i]) - fit.c));
  return fit;
}

double saturation_length(double fundamental_area, double k_max, double l0) {
  return fundamental_area * k_max / l0;
}

SaturationFit rigidity_saturation(const std::vector<double>& k, double fundamental_area,
                                  const std::vector<double>& k_max, std::size_t plateau_points,
                                  double l0) {
  std::vector<double> cuts = k_max;
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.size() < 4) throw DomainError("rigidity_saturation: at least four k_max cuts");
  if (plateau_points < 2) throw DomainError("rigidity_saturation: plateau needs two points");
  require_sorted(k, "rigidity_saturation");

  SaturationFit fit;
  for (double km : cuts) {
    SaturationPoint pt;
    pt.k_max = km;
    std::vector<double> cut(k.begin(), std::upper_bound(k.begin(), k.end(), km));
    pt.levels = cut.size();
    const auto unfolded = unfold(cut, fundamental_area);
    pt.l_max = saturation_length(fundamental_area, km, l0);
    double mean = 0.0;
    for (std::size_t i = 0; i < plateau_points; ++i) {
      const double L =
          pt.l_max * (1.2 + 0.8 * static_cast<double>(i) / static_cast<double>(plateau_points - 1));
      pt.L.push_back(L);
      pt.delta3.push_back(delta3(unfolded.levels, L));
      mean += pt.delta3.back();
    }
    mean /= static_cast<double>(plateau_points);
    pt.delta3_inf = mean;
    // rising if the least-squares slope over the plateau adds more than 10%
    double lm = 0, dm = 0;
    for (std::size_t i = 0; i < plateau_points; ++i) {
      lm += pt.L[i];
      dm += pt.delta3[i];
    }
    lm /= static_cast<double>(plateau_points);
    dm /= static_cast<double>(plateau_points);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < plateau_points; ++i) {
      sxy += (pt.L[i] - lm) * (pt.delta3[i] - dm);
      sxx += (pt.L[i] - lm) * (pt.L[i] - lm);
    }
    const double rise = sxy / sxx * (pt.L.back() - pt.L.front());
    pt.still_rising = rise > 0.1 * mean;
    if (pt.still_rising) {
      fit.warnings.push_back("Delta_3 still rising at 2 L_max for k_max = " + std::to_string(km));
    }
    fit.points.push_back(std::move(pt));
  }

  double xm = 0, ym = 0;
  for (const auto& p : fit.points) {
    xm += std::log(p.k_max * p.k_max);
    ym += p.delta3_inf;
  }
  const double np = static_cast<double>(fit.points.size());
  xm /= np;
  ym /= np;
  double sxy = 0, sxx = 0;
  for (const auto& p : fit.points) {
    const double x = std::log(p.k_max * p.k_max) - xm;
    sxy += x * (p.delta3_inf - ym);
    sxx += x * x;
  }
  const double slope = sxy / sxx;
  fit.c = ym - slope * xm;
  fit.alpha = 1.0 / (slope * pi * pi);
  if (!(slope > 0.0)) fit.warnings.push_back("saturation values do not grow with k_max");
  return fit;
}

}  // namespace c3b::stats
