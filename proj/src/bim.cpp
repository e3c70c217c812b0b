// SPDX-License-Identifier: Apache-2.0
#include "c3b/bim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "c3b/error.hpp"
#include "c3b/specfun.hpp"

namespace c3b::bim {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

// Kress weights for the periodic log singularity on an M-point grid.
//   W_D = R_D - (2 pi / M) ln(4 sin^2(pi D / M)),  D != 0
// where R_D = -(2pi/n) sum_{m<n} cos(m t_D)/m - (pi/n^2) cos(n t_D), n = M/2.
// W_0 is unused: the diagonal is handled by the kernel limit.
std::vector<double> kress_weights(std::size_t M) {
  const std::size_t n = M / 2;
  std::vector<double> cosine(M);
  for (std::size_t j = 0; j < M; ++j) {
    cosine[j] = std::cos(two_pi * static_cast<double>(j) / static_cast<double>(M));
  }
  std::vector<double> w(M, 0.0);
  const double dn = static_cast<double>(n);
  for (std::size_t d = 1; d < M; ++d) {
    double sum = 0.0;
    std::size_t idx = 0;
    for (std::size_t m = 1; m < n; ++m) {
      idx += d;
      if (idx >= M) idx -= M;
      sum += cosine[idx] / static_cast<double>(m);
    }
    const double cn = cosine[(n * d) % M];
    const double r = -two_pi / dn * sum - pi / (dn * dn) * cn;
    const double s = std::sin(pi * static_cast<double>(d) / static_cast<double>(M));
    w[d] = r - two_pi / static_cast<double>(M) * std::log(4.0 * s * s);
  }
  return w;
}

// Node of the full periodic grid with its index.
struct GridNode {
  Vec2 x;
  Vec2 n;
  double zeta;
  double speed;
  double curvature;
  std::size_t index;
};

GridNode grid_node(const QuadratureSet& q, std::size_t j, int ell) {
  const BoundaryPoint& p = q.nodes[j];
  return {rotate(p.position, ell), rotate(p.outward_normal, ell), q.weights[j], p.speed,
          p.curvature, j + static_cast<std::size_t>(ell) * q.size()};
}

class EntryRule {
public:
  EntryRule(const QuadratureSet& q, cplx k, const AssemblyOptions& opt)
      : k_(k), opt_(opt), M_(q.full_size()) {
    if (opt.rule == QuadratureRule::kress) weights_ = kress_weights(M_);
  }

  // Weight of source y in the row of target x; d = |x - y| > 0 and the
  // Bessel values at kd are shared between the two entries of a pair.
  cplx entry(const GridNode& x, const GridNode& y, double d,
             const specfun::BesselJY01& b) const {
    const Vec2 diff = x.x - y.x;
    const bool target = opt_.form == KernelForm::normal_at_target;
    const double s = target ? 1.0 : -1.0;
    const double g = (target ? x.n : y.n).dot(diff) / d;
    const cplx kernel = s * 0.25 * I * k_ * g * b.h1();
    cplx value = y.zeta * kernel;
    if (!weights_.empty()) {
      const std::size_t delta = (x.index + M_ - y.index) % M_;
      const cplx l1 = -s * k_ / (4.0 * pi) * g * b.j1 * y.speed;
      value += weights_[delta] * l1;
    }
    return value;
  }

  cplx diagonal(const GridNode& x) const { return x.zeta * x.curvature / (4.0 * pi); }

  cplx k() const { return k_; }

private:
  cplx k_;
  AssemblyOptions opt_;
  std::size_t M_;
  std::vector<double> weights_;
};

void check_size(const QuadratureSet& q, const AssemblyOptions& opt) {
  if (q.size() == 0) throw DomainError("empty quadrature set");
  if (q.size() > opt.max_size) {
    throw ResourceError("Fredholm matrix of size " + std::to_string(q.size()) +
                        " exceeds the configured maximum " + std::to_string(opt.max_size));
  }
}

cplx kernel_value(const BoundaryPoint& x, const BoundaryPoint& y, cplx k, bool diagonal_limit,
                  bool target) {
  if (k == cplx(0.0)) throw DomainError("kernel requires k != 0");
  const Vec2 diff = x.position - y.position;
  const double d = diff.norm();
  if (d == 0.0) {
    if (!diagonal_limit) throw DomainError("kernel evaluated at coincident points");
    return x.curvature / (4.0 * pi);
  }
  const double g = (target ? x.outward_normal : y.outward_normal).dot(diff) / d;
  const cplx h1 = specfun::hankel1(1, k * d).value;
  return (target ? 1.0 : -1.0) * 0.25 * I * k * g * h1;
}

}  // namespace

cplx dlp_kernel(const BoundaryPoint& x, const BoundaryPoint& y, cplx k, bool diagonal_limit) {
  return kernel_value(x, y, k, diagonal_limit, false);
}

cplx adjoint_dlp_kernel(const BoundaryPoint& x, const BoundaryPoint& y, cplx k,
                        bool diagonal_limit) {
  return kernel_value(x, y, k, diagonal_limit, true);
}

ImageBlocks assemble_blocks(const QuadratureSet& q, cplx k, const AssemblyOptions& options) {
  check_size(q, options);
  if (k == cplx(0.0)) throw DomainError("assembly requires k != 0");
  const std::size_t N = q.size();
  const EntryRule rule(q, k, options);

  std::array<std::vector<GridNode>, 3> images;
  for (int ell = 0; ell < 3; ++ell) {
    images[static_cast<std::size_t>(ell)].reserve(N);
    for (std::size_t j = 0; j < N; ++j) images[static_cast<std::size_t>(ell)].push_back(grid_node(q, j, ell));
  }
  const auto& base = images[0];

  ImageBlocks out;
  out.k = k;
  for (auto& b : out.blocks) b.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  auto& b0 = out.blocks[0];
  auto& b1 = out.blocks[1];
  auto& b2 = out.blocks[2];

  // l = 0: |x_i - x_j| is symmetric in (i, j).
  for (std::size_t i = 0; i < N; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    b0(ii, ii) = rule.diagonal(base[i]);
    for (std::size_t j = i + 1; j < N; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double d = (base[i].x - base[j].x).norm();
      const auto bes = specfun::bessel_jy01(k * d);
      b0(ii, jj) = rule.entry(base[i], base[j], d, bes);
      b0(jj, ii) = rule.entry(base[j], base[i], d, bes);
    }
  }
  // |x_i - R x_j| = |x_j - R^2 x_i|: entry (i, j) of B_1 and entry (j, i) of
  // B_2 share their Bessel values.
  const auto& img1 = images[1];
  const auto& img2 = images[2];
  for (std::size_t i = 0; i < N; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < N; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double d = (base[i].x - img1[j].x).norm();
      const auto bes = specfun::bessel_jy01(k * d);
      b1(ii, jj) = rule.entry(base[i], img1[j], d, bes);
      b2(jj, ii) = rule.entry(base[j], img2[i], d, bes);
    }
  }
  return out;
}

Eigen::MatrixXcd combine_blocks(const ImageBlocks& blocks, SectorLabel m) {
  Eigen::MatrixXcd a = blocks.blocks[0];
  a.diagonal().array() += 0.5;
  for (int ell = 1; ell < 3; ++ell) {
    a += std::conj(character(m, ell)) * blocks.blocks[static_cast<std::size_t>(ell)];
  }
  return a;
}

FredholmMatrix assemble_fredholm(std::shared_ptr<const QuadratureSet> quad, SectorLabel m,
                                 cplx k, const AssemblyOptions& options) {
  if (!quad) throw DomainError("missing quadrature set");
  FredholmMatrix f;
  f.k = k;
  f.m = m;
  f.entries = combine_blocks(assemble_blocks(*quad, k, options), m);
  f.quadrature = std::move(quad);
  return f;
}

Eigen::MatrixXcd assemble_full(const QuadratureSet& q, cplx k, const AssemblyOptions& options) {
  check_size(q, options);
  const std::size_t N = q.size();
  const std::size_t M = 3 * N;
  const EntryRule rule(q, k, options);
  std::vector<GridNode> nodes;
  nodes.reserve(M);
  for (int ell = 0; ell < 3; ++ell) {
    for (std::size_t j = 0; j < N; ++j) nodes.push_back(grid_node(q, j, ell));
  }
  const auto m = static_cast<Eigen::Index>(M);
  Eigen::MatrixXcd a(m, m);
  for (std::size_t i = 0; i < M; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    a(ii, ii) = 0.5 + rule.diagonal(nodes[i]);
    for (std::size_t j = i + 1; j < M; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double d = (nodes[i].x - nodes[j].x).norm();
      const auto bes = specfun::bessel_jy01(k * d);
      a(ii, jj) = rule.entry(nodes[i], nodes[j], d, bes);
      a(jj, ii) = rule.entry(nodes[j], nodes[i], d, bes);
    }
  }
  return a;
}

BoundaryFunction normalized(BoundaryFunction f) {
  if (!f.quadrature) throw DomainError("boundary function without quadrature");
  const auto& w = f.quadrature->weights;
  if (static_cast<std::size_t>(f.u.size()) != w.size()) {
    throw DomainError("boundary function size does not match its quadrature");
  }
  double norm2 = 0.0;
  Eigen::Index imax = 0;
  for (Eigen::Index j = 0; j < f.u.size(); ++j) {
    norm2 += w[static_cast<std::size_t>(j)] * std::norm(f.u(j));
    if (std::abs(f.u(j)) > std::abs(f.u(imax))) imax = j;
  }
  if (!(norm2 > 0.0)) throw NumericError("boundary function has zero norm");
  const cplx phase = std::abs(f.u(imax)) > 0.0 ? std::conj(f.u(imax)) / std::abs(f.u(imax)) : 1.0;
  f.u *= phase / std::sqrt(norm2);
  return f;
}

Eigen::VectorXcd extend_to_full(const BoundaryFunction& f) {
  const Eigen::Index n = f.u.size();
  Eigen::VectorXcd full(3 * n);
  for (int ell = 0; ell < 3; ++ell) {
    full.segment(ell * n, n) = std::conj(character(f.m, ell)) * f.u;
  }
  return full;
}

WavefunctionResult reconstruct_wavefunction(const BoundaryFunction& f,
                                            const std::vector<Vec2>& points) {
  if (!f.quadrature) throw DomainError("boundary function without quadrature");
  const QuadratureSet& q = *f.quadrature;
  const std::size_t N = q.size();
  const Eigen::VectorXcd full = extend_to_full(f);
  std::vector<Vec2> src;
  src.reserve(3 * N);
  for (int ell = 0; ell < 3; ++ell) {
    for (std::size_t j = 0; j < N; ++j) src.push_back(rotate(q.nodes[j].position, ell));
  }
  const double near = two_pi / f.k / 10.0;

  WavefunctionResult out;
  out.values.reserve(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    cplx acc = 0.0;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t J = 0; J < src.size(); ++J) {
      const double d = (points[p] - src[J]).norm();
      dmin = std::min(dmin, d);
      if (d == 0.0) continue;
      acc += q.weights[J % N] * specfun::bessel_jy01(f.k * d).h0() * full(static_cast<Eigen::Index>(J));
    }
    if (dmin < near) out.near_boundary.push_back(p);
    out.values.push_back(0.25 * I * acc);
  }
  return out;
}

std::vector<cplx> boundary_trace(const BoundaryFunction& f, const std::vector<double>& phis) {
  if (!f.quadrature) throw DomainError("boundary function without quadrature");
  const QuadratureSet& q = *f.quadrature;
  const BoundaryShape shape(q.deformation);
  const std::size_t N = q.size();
  const std::size_t M = 3 * N;
  const std::size_t n = M / 2;
  const double dn = static_cast<double>(n);
  const double h = q.step();
  const Eigen::VectorXcd full = extend_to_full(f);

  std::vector<cplx> out;
  out.reserve(phis.size());
  for (double phi : phis) {
    const Vec2 x = boundary_point(shape, phi).position;
    cplx acc = 0.0;
    for (std::size_t J = 0; J < M; ++J) {
      const std::size_t j = J % N;
      const int ell = static_cast<int>(J / N);
      const Vec2 y = rotate(q.nodes[j].position, ell);
      const double d = (x - y).norm();
      const double t = phi - h * static_cast<double>(J);
      const double s = std::sin(0.5 * t);
      if (d == 0.0 || std::abs(s) < 1e-14) {
        throw DomainError("boundary_trace target coincides with a quadrature node");
      }
      const auto bes = specfun::bessel_jy01(f.k * d);
      const cplx uJ = full(static_cast<Eigen::Index>(J));
      // -G = (i/4) H0; its log part is -(1/4pi) J0 ln d^2.
      acc += q.weights[j] * 0.25 * I * bes.h0() * uJ;
      double r = 0.0;
      for (std::size_t m = 1; m < n; ++m) r += std::cos(static_cast<double>(m) * t) / static_cast<double>(m);
      r = -two_pi / dn * r - pi / (dn * dn) * std::cos(dn * t);
      const cplx m1 = -bes.j0 / (4.0 * pi) * q.nodes[j].speed * uJ;
      acc += m1 * (r - h * std::log(4.0 * s * s));
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace c3b::bim
