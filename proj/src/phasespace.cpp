// SPDX-License-Identifier: Apache-2.0
#include "c3b/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "c3b/error.hpp"

namespace c3b::phasespace {

namespace {

constexpr double pi = std::numbers::pi;
// exp(-40) ~ 4e-18: Gaussian factors below this are dropped
constexpr double gaussian_cutoff = 40.0;

}  // namespace

double HusimiGrid::q_center(std::size_t i) const {
  return (static_cast<double>(i) + 0.5) * q_max / static_cast<double>(nq);
}

double HusimiGrid::p_center(std::size_t j) const {
  return -1.0 + (static_cast<double>(j) + 0.5) * 2.0 / static_cast<double>(np);
}

GridDims default_grid_dims(double section_length, double k, std::size_t max_q, std::size_t max_p) {
  if (!(section_length > 0.0 && k > 0.0)) throw DomainError("default_grid_dims: bad input");
  auto nq = static_cast<std::size_t>(std::ceil(section_length * k / (2.0 * pi)));
  auto np = (nq + 1) / 2;
  nq = std::min(std::max<std::size_t>(nq, 16), std::max<std::size_t>(max_q, 16));
  np = std::min(std::max<std::size_t>(np, 16), std::max<std::size_t>(max_p, 16));
  return {nq, np};
}

HusimiGrid husimi_sector(const bim::BoundaryFunction& f, std::size_t nq, std::size_t np,
                         const HusimiOptions& options) {
  if (nq < 16 || np < 16) throw DomainError("husimi_sector: grid dims must be at least 16");
  if (!f.quadrature) throw DomainError("husimi_sector: boundary function has no quadrature");
  const QuadratureSet& quad = *f.quadrature;
  const auto n = static_cast<Eigen::Index>(quad.size());
  if (f.u.size() != n) throw DomainError("husimi_sector: density size does not match nodes");
  if (options.max_winding < 0) throw DomainError("husimi_sector: negative winding");

  const double k = f.k;
  const double L = quad.full_perimeter;
  const double Lf = quad.fundamental_perimeter;

  HusimiGrid grid;
  grid.nq = nq;
  grid.np = np;
  grid.k = k;
  grid.m = f.m;
  grid.q_max = options.section == Section::fundamental ? Lf : L;
  if (static_cast<double>(nq) < grid.q_max * k / (2.0 * pi))
    grid.warnings.push_back("Husimi grid under-resolved in q");

  // Full-boundary samples sigma = s_j + l L/3 with weights conj(chi) zeta_j u_j.
  std::vector<double> sigma;
  std::vector<cplx> weight;
  sigma.reserve(3 * static_cast<std::size_t>(n));
  weight.reserve(3 * static_cast<std::size_t>(n));
  for (int l = 0; l < 3; ++l) {
    const cplx cc = std::conj(character(f.m, l));
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      sigma.push_back(quad.nodes[ju].arclength + l * Lf);
      weight.push_back(cc * quad.weights[ju] * f.u[j]);
    }
  }

  const double norm = std::pow(k / pi, 0.25);
  const double reach = std::sqrt(2.0 * gaussian_cutoff / k);
  const double dp = 2.0 / static_cast<double>(np);
  std::vector<cplx> amp(np);
  grid.values.assign(nq * np, 0.0);
  for (std::size_t i = 0; i < nq; ++i) {
    const double q = grid.q_center(i);
    std::fill(amp.begin(), amp.end(), cplx(0.0));
    for (std::size_t s = 0; s < sigma.size(); ++s) {
      for (int w = -options.max_winding; w <= options.max_winding; ++w) {
        const double d = sigma[s] - q + w * L;
        if (std::abs(d) > reach) continue;
        // c* = g exp(+i k p d); p_j = -1 + (j + 1/2) dp
        const cplx base = weight[s] * norm * std::exp(-0.5 * k * d * d);
        cplx phase = std::polar(1.0, k * (-1.0 + 0.5 * dp) * d);
        const cplx step = std::polar(1.0, k * dp * d);
        for (std::size_t j = 0; j < np; ++j) {
          amp[j] += base * phase;
          phase *= step;
        }
      }
    }
    for (std::size_t j = 0; j < np; ++j) grid.values[i * np + j] = std::norm(amp[j]);
  }
  double total = 0.0;
  for (double v : grid.values) total += v;
  if (!(total > 0.0)) throw NumericError("husimi_sector: vanishing Husimi function");
  for (double& v : grid.values) v /= total;
  return grid;
}

Localization localization_measures(const std::vector<double>& grid, double n_eff, double n_c) {
  if (!(n_eff > 0.0 && n_c > 0.0)) throw DomainError("localization_measures: counts must be positive");
  Localization out;
  double s = 0.0, sq = 0.0;
  for (double h : grid) {
    if (h < 0.0) throw DomainError("localization_measures: negative grid entry");
    if (h > 0.0) s -= h * std::log(h);
    sq += h * h;
  }
  out.entropy = s;
  out.a = std::exp(s) / n_eff;
  out.r_ipr = 1.0 / (n_c * sq);
  return out;
}

Localization localization_measures(const HusimiGrid& grid) {
  const auto cells = static_cast<double>(grid.values.size());
  return localization_measures(grid.values, cells, cells);
}

std::size_t chaotic_cells(const classical::Heatmap& map, double threshold, std::size_t nq,
                          std::size_t np) {
  if (map.ns == 0 || map.np == 0) throw DomainError("chaotic_cells: empty heatmap");
  std::size_t count = 0;
  for (std::size_t i = 0; i < nq; ++i) {
    const double sf = (static_cast<double>(i) + 0.5) / static_cast<double>(nq);
    const auto mi = std::min(map.ns - 1, static_cast<std::size_t>(sf * static_cast<double>(map.ns)));
    for (std::size_t j = 0; j < np; ++j) {
      const double pf = (static_cast<double>(j) + 0.5) / static_cast<double>(np);
      const auto mj = std::min(map.np - 1, static_cast<std::size_t>(pf * static_cast<double>(map.np)));
      if (map.at(mi, mj) > threshold) ++count;
    }
  }
  return count;
}

double BetaFit::mode() const {
  if (!(alpha > 1.0 && beta > 1.0)) return std::numeric_limits<double>::quiet_NaN();
  return a0 * (alpha - 1.0) / (alpha + beta - 2.0);
}

double beta_sigma(double alpha, double beta, double a0) {
  const double s = alpha + beta;
  return a0 * std::sqrt(alpha * beta / (s * s * (s + 1.0)));
}

BetaFit beta_fit(std::vector<double> samples, const BetaFitOptions& options) {
  using boost::math::digamma;
  using boost::math::trigamma;
  if (samples.empty()) throw DomainError("beta_fit: no samples");
  for (double a : samples)
    if (!(a > 0.0 && std::isfinite(a))) throw DomainError("beta_fit: samples must be positive");
  std::sort(samples.begin(), samples.end());
  BetaFit fit;
  const auto cut = static_cast<std::size_t>(
      std::floor(options.tail_percentile / 100.0 * static_cast<double>(samples.size())));
  fit.excluded = cut;
  samples.erase(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(cut));
  if (samples.size() < 200) throw DomainError("beta_fit: fewer than 200 samples after the tail cut");
  fit.sample_count = samples.size();
  fit.a0 = options.fixed_a0 > 0.0 ? options.fixed_a0
                                   : std::min(1.0, options.a0_factor * samples.back());
  if (!(samples.back() < fit.a0)) throw DomainError("beta_fit: sample at or above A0");

  const double n = static_cast<double>(samples.size());
  double m1 = 0, m2 = 0, mean = 0, var = 0;
  for (double a : samples) {
    const double t = a / fit.a0;
    m1 += std::log(t);
    m2 += std::log1p(-t);
    mean += t;
  }
  m1 /= n;
  m2 /= n;
  mean /= n;
  for (double a : samples) var += (a / fit.a0 - mean) * (a / fit.a0 - mean);
  var /= n;
  const double common = std::max(mean * (1.0 - mean) / var - 1.0, 1e-3);
  double x = std::log(std::max(mean * common, 1e-3));
  double y = std::log(std::max((1.0 - mean) * common, 1e-3));

  auto loglik = [&](double lx, double ly) {
    const double al = std::exp(lx), be = std::exp(ly);
    return (al - 1.0) * m1 + (be - 1.0) * m2 - std::log(boost::math::beta(al, be));
  };

  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    fit.iterations = it + 1;
    const double al = std::exp(x), be = std::exp(y);
    const double ps = digamma(al + be), ts = trigamma(al + be);
    const double ga = m1 - digamma(al) + ps;
    const double gb = m2 - digamma(be) + ps;
    const double haa = -trigamma(al) + ts, hbb = -trigamma(be) + ts, hab = ts;
    // gradient and Hessian in (ln alpha, ln beta)
    const double gx = al * ga, gy = be * gb;
    const double hxx = al * al * haa + gx, hyy = be * be * hbb + gy, hxy = al * be * hab;
    const double det = hxx * hyy - hxy * hxy;
    double dx, dy;
    if (hxx < 0.0 && det > 0.0) {
      dx = -(hyy * gx - hxy * gy) / det;
      dy = -(hxx * gy - hxy * gx) / det;
    } else {
      dx = gx;
      dy = gy;
    }
    const double len = std::hypot(dx, dy);
    if (len > 1.0) {
      dx /= len;
      dy /= len;
    }
    const double f0 = loglik(x, y);
    double t = 1.0;
    while (t > 1e-12 && !(loglik(x + t * dx, y + t * dy) >= f0)) t *= 0.5;
    x += t * dx;
    y += t * dy;
    if (t * std::hypot(dx, dy) < 1e-12 || std::hypot(gx, gy) < 1e-12) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericError("beta_fit: likelihood maximization did not converge");
  fit.alpha = std::exp(x);
  fit.beta = std::exp(y);
  fit.sigma = beta_sigma(fit.alpha, fit.beta, fit.a0);
  return fit;
}

ScalingFit scaling_fit(const std::vector<double>& k, const std::vector<double>& sigma) {
  if (k.size() != sigma.size()) throw DomainError("scaling_fit: size mismatch");
  if (k.size() < 4) throw DomainError("scaling_fit: at least four points are required");
  const auto [kmin, kmax] = std::minmax_element(k.begin(), k.end());
  if (!(*kmax >= 2.0 * *kmin)) throw DomainError("scaling_fit: k must span a factor of two");
  ScalingFit fit;
  fit.k = k;
  fit.sigma = sigma;
  const double n = static_cast<double>(k.size());
  double xm = 0, ym = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!(k[i] > 0.0 && sigma[i] > 0.0)) throw DomainError("scaling_fit: values must be positive");
    xm += std::log10(k[i]);
    ym += std::log10(sigma[i]);
  }
  xm /= n;
  ym /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double dx = std::log10(k[i]) - xm;
    sxy += dx * (std::log10(sigma[i]) - ym);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  fit.gamma = -slope;
  fit.c = ym - slope * xm;
  for (std::size_t i = 0; i < k.size(); ++i)
    fit.residuals.push_back(std::log10(sigma[i]) - (fit.c - fit.gamma * std::log10(k[i])));
  return fit;
}

}  // namespace c3b::phasespace
