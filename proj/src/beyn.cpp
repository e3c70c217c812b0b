// SPDX-License-Identifier: Apache-2.0
#include "c3b/beyn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "c3b/error.hpp"
#include "c3b/parallel.hpp"
#include "c3b/random.hpp"

namespace c3b::beyn {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr int max_split_depth = 5;

Eigen::MatrixXcd solve_node(const Eigen::MatrixXcd& T, const Eigen::MatrixXcd& V, int node) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(T);
  Eigen::MatrixXcd X = lu.solve(V);
  if (!X.allFinite()) {
    throw NumericError("linear solve failed at contour node " + std::to_string(node));
  }
  return X;
}

void validate(const Contour& c) {
  if (!(c.radius > 0.0)) throw DomainError("contour radius must be positive");
  if (c.nodes < 4) throw DomainError("contour needs at least 4 nodes");
  if (!(c.keep_fraction > 0.0 && c.keep_fraction < 1.0)) {
    throw DomainError("keep fraction must lie in (0, 1)");
  }
}

}  // namespace

cplx Contour::node(int j) const {
  const double theta = two_pi * (j + 0.5) / nodes;
  return center + radius * std::exp(I * theta);
}

cplx Contour::weight(int j) const {
  // dz / (2 pi i) with dz = i R e^{i theta} (2 pi / N)
  const double theta = two_pi * (j + 0.5) / nodes;
  return radius * std::exp(I * theta) / static_cast<double>(nodes);
}

Eigen::MatrixXcd probe_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                              std::initializer_list<std::uint64_t> stream) {
  auto engine = stream_engine(seed, stream);
  std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2.0);
  Eigen::MatrixXcd V(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(engine);
      const double im = normal(engine);
      V(r, c) = cplx(re, im);
    }
  }
  return V;
}

std::vector<MomentPair> contour_moments_shared(
    const std::function<std::vector<Eigen::MatrixXcd>(cplx)>& T, const Contour& contour,
    const std::vector<Eigen::MatrixXcd>& probes, std::size_t workers) {
  validate(contour);
  const std::size_t families = probes.size();
  const auto n = static_cast<std::size_t>(contour.nodes);
  std::vector<std::vector<Eigen::MatrixXcd>> solved(n);
  parallel_for(n, workers, [&](std::size_t j) {
    const int jj = static_cast<int>(j);
    const std::vector<Eigen::MatrixXcd> mats = T(contour.node(jj));
    if (mats.size() != families) throw DomainError("matrix family count does not match probes");
    solved[j].reserve(families);
    for (std::size_t f = 0; f < families; ++f) solved[j].push_back(solve_node(mats[f], probes[f], jj));
  });
  std::vector<MomentPair> out(families);
  for (std::size_t f = 0; f < families; ++f) {
    out[f].a0 = Eigen::MatrixXcd::Zero(probes[f].rows(), probes[f].cols());
    out[f].a1 = out[f].a0;
    out[f].probe_norm = probes[f].norm();
  }
  for (std::size_t j = 0; j < n; ++j) {
    const int jj = static_cast<int>(j);
    const cplx w = contour.weight(jj);
    const cplx z = contour.node(jj);
    for (std::size_t f = 0; f < families; ++f) {
      out[f].a0 += w * solved[j][f];
      out[f].a1 += (w * z) * solved[j][f];
    }
  }
  return out;
}

MomentPair contour_moments(const MatrixFamily& T, const Contour& contour,
                           const Eigen::MatrixXcd& V, std::size_t workers) {
  auto shared = [&](cplx z) { return std::vector<Eigen::MatrixXcd>{T(z)}; };
  return contour_moments_shared(shared, contour, {V}, workers)[0];
}

EigenResult reduce_and_solve(const MomentPair& moments, const MatrixFamily& T,
                             const Contour& contour, const ProbeConfig& config, int contour_id) {
  validate(contour);
  const double probe_norm = moments.probe_norm;
  if (!moments.a0.allFinite() || !moments.a1.allFinite()) {
    throw NumericError("contour moments are not finite");
  }
  EigenResult res;
  res.contour_id = contour_id;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(moments.a0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  res.singular_values = svd.singularValues();
  const auto& sv = res.singular_values;
  const Eigen::Index L = moments.a0.cols();
  if (sv.size() == 0 || sv(0) == 0.0) return res;

  const double cutoff = std::max(config.rank_tol * sv(0), config.noise_floor * probe_norm);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;
  res.rank = static_cast<std::size_t>(r);
  if (r >= L) {
    throw AmbiguousRankError("moment matrix has full numerical rank " + std::to_string(r) +
                             "; more eigenvalues than probe columns");
  }
  if (config.min_rank_gap > 0.0 && r > 0 && r < sv.size() && sv(r) > 0.0 &&
      sv(r - 1) / sv(r) < config.min_rank_gap) {
    std::ostringstream msg;
    msg << "singular value gap " << sv(r - 1) / sv(r) << " at rank " << r << " is ambiguous";
    throw AmbiguousRankError(msg.str());
  }
  if (r == 0) return res;

  const Eigen::MatrixXcd U = svd.matrixU().leftCols(r);
  const Eigen::MatrixXcd W = svd.matrixV().leftCols(r);
  const Eigen::VectorXd inv_s = sv.head(r).cwiseInverse();
  const Eigen::MatrixXcd B = U.adjoint() * moments.a1 * W * inv_s.asDiagonal();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(B);
  if (eig.info() != Eigen::Success) throw NumericError("reduced eigenproblem did not converge");

  // order by real part for reproducible output
  std::vector<Eigen::Index> order(static_cast<std::size_t>(r));
  for (Eigen::Index i = 0; i < r; ++i) order[static_cast<std::size_t>(i)] = i;
  const auto& ev = eig.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() < ev(b).real();
    return ev(a).imag() < ev(b).imag();
  });

  res.vectors.resize(U.rows(), r);
  const double keep_radius = contour.keep_fraction * contour.radius;
  for (Eigen::Index c = 0; c < r; ++c) {
    const Eigen::Index idx = order[static_cast<std::size_t>(c)];
    const cplx lambda = ev(idx);
    Eigen::VectorXcd v = U * eig.eigenvectors().col(idx);
    const double nv = v.norm();
    if (nv > 0.0) v /= nv;
    res.vectors.col(c) = v;
    res.eigenvalues.push_back(lambda);
    double residual = std::numeric_limits<double>::quiet_NaN();
    if (std::abs(lambda - contour.center) < contour.radius) {
      residual = (T(lambda) * v).norm();
    }
    res.residuals.push_back(residual);
    res.kept.push_back(residual < config.residual_tol && std::abs(lambda.imag()) < config.im_tol &&
                       std::abs(lambda - contour.center) < keep_radius);
  }
  return res;
}

std::vector<std::pair<double, double>> window_tiles(double fundamental_area, double k_lo,
                                                    double k_hi, const WindowPolicy& policy) {
  if (!(k_hi > k_lo)) throw DomainError("empty wavenumber window");
  const double shrink = policy.keep_fraction * (1.0 - policy.overlap);
  std::vector<std::pair<double, double>> tiles;
  double e = k_lo;
  while (e < k_hi) {
    // expected count inside a contour of radius R centered at c: A c R / pi
    const double c_est = e + policy.max_radius;
    const double r_cap = policy.max_per_contour * std::numbers::pi / (fundamental_area * c_est);
    const double radius = std::min(policy.max_radius, r_cap);
    const double width = 2.0 * shrink * radius;
    double hi = e + width;
    if (hi >= k_hi - 1e-3 * width) hi = k_hi;
    tiles.emplace_back(e, hi);
    e = hi;
  }
  return tiles;
}

namespace {

struct SectorOutcome {
  std::vector<SpectrumEntry> entries;
  std::vector<bim::BoundaryFunction> states;
  std::vector<std::pair<double, double>> gaps;
  std::size_t rejected_in_keep = 0;
  std::size_t contours = 0;
};

class WindowSolver {
public:
  WindowSolver(const BoundaryShape& shape, std::vector<SectorLabel> sectors,
               const WindowPolicy& policy)
      : table_(shape), sectors_(std::move(sectors)), policy_(policy) {}

  // Solves the keep interval [lo, hi] for the sectors flagged in `active`.
  void solve_tile(std::size_t tile, double lo, double hi, int heap, const std::vector<bool>& active,
                  std::vector<SectorOutcome>& out) const {
    const double shrink = policy_.keep_fraction * (1.0 - policy_.overlap);
    const double center = 0.5 * (lo + hi);
    Contour contour;
    contour.center = center;
    contour.radius = 0.5 * (hi - lo) / shrink;
    contour.nodes = policy_.nodes;
    contour.keep_fraction = policy_.keep_fraction;
    const int contour_id = static_cast<int>(tile) * (1 << (max_split_depth + 1)) + heap;

    auto quad = std::make_shared<const QuadratureSet>(quadrature_nodes(
        table_, center, policy_.points_per_wavelength, policy_.max_quadrature_nodes));
    const auto N = static_cast<Eigen::Index>(quad->size());
    const double expected = table_.fundamental_area() * center * contour.radius / std::numbers::pi;
    const auto L = static_cast<Eigen::Index>(std::ceil(policy_.probe_factor * expected)) +
                   static_cast<Eigen::Index>(policy_.probe_extra);

    std::vector<std::size_t> which;
    std::vector<Eigen::MatrixXcd> probes;
    for (std::size_t s = 0; s < sectors_.size(); ++s) {
      if (!active[s]) continue;
      which.push_back(s);
      probes.push_back(probe_matrix(N, std::min(L, N), policy_.seed,
                                    {static_cast<std::uint64_t>(sectors_[s].value()),
                                     static_cast<std::uint64_t>(tile),
                                     static_cast<std::uint64_t>(heap)}));
    }
    const bim::AssemblyOptions opt = policy_.assembly;
    auto family = [&](cplx z) {
      const bim::ImageBlocks blocks = bim::assemble_blocks(*quad, z, opt);
      std::vector<Eigen::MatrixXcd> mats;
      mats.reserve(which.size());
      for (std::size_t s : which) mats.push_back(bim::combine_blocks(blocks, sectors_[s]));
      return mats;
    };
    const std::vector<MomentPair> moments =
        contour_moments_shared(family, contour, probes, inner_workers_);

    std::vector<bool> retry(sectors_.size(), false);
    bool any_retry = false;
    for (std::size_t f = 0; f < which.size(); ++f) {
      const std::size_t s = which[f];
      const SectorLabel m = sectors_[s];
      auto T = [&](cplx z) { return bim::combine_blocks(bim::assemble_blocks(*quad, z, opt), m); };
      ProbeConfig cfg;
      cfg.columns = static_cast<std::size_t>(probes[f].cols());
      cfg.seed = policy_.seed;
      cfg.rank_tol = policy_.rank_tol;
      cfg.noise_floor = policy_.noise_floor;
      cfg.residual_tol = policy_.residual_tol;
      cfg.im_tol = policy_.im_tol;
      cfg.min_rank_gap = policy_.min_rank_gap;
      EigenResult res;
      try {
        res = reduce_and_solve(moments[f], T, contour, cfg, contour_id);
      } catch (const AmbiguousRankError&) {
        if (heap >= (1 << policy_.max_splits)) {
          out[s].gaps.emplace_back(lo, hi);
        } else {
          retry[s] = true;
          any_retry = true;
        }
        continue;
      }
      ++out[s].contours;
      const double keep_radius = contour.keep_fraction * contour.radius;
      for (std::size_t e = 0; e < res.eigenvalues.size(); ++e) {
        const cplx lambda = res.eigenvalues[e];
        if (!res.kept[e]) {
          if (std::abs(lambda - contour.center) < keep_radius &&
              std::abs(lambda.imag()) < policy_.im_tol) {
            ++out[s].rejected_in_keep;
          }
          continue;
        }
        SpectrumEntry entry;
        entry.k = lambda.real();
        entry.im_k = lambda.imag();
        entry.residual = res.residuals[e];
        entry.contour_id = contour_id;
        entry.n_nodes = quad->size();
        out[s].entries.push_back(entry);
        if (policy_.keep_vectors) {
          bim::BoundaryFunction bf;
          bf.u = res.vectors.col(static_cast<Eigen::Index>(e));
          bf.k = entry.k;
          bf.m = m;
          bf.quadrature = quad;
          out[s].states.push_back(bim::normalized(std::move(bf)));
        }
      }
    }
    if (any_retry) {
      const double mid = 0.5 * (lo + hi);
      solve_tile(tile, lo, mid, 2 * heap, retry, out);
      solve_tile(tile, mid, hi, 2 * heap + 1, retry, out);
    }
  }

  std::vector<WindowResult> run(double k_lo, double k_hi) {
    if (!(k_lo >= policy_.k_floor)) {
      throw DomainError("window start below the configured floor k=" + std::to_string(policy_.k_floor));
    }
    if (policy_.max_splits < 0 || policy_.max_splits > max_split_depth) {
      throw DomainError("max_splits must lie in [0, 5]");
    }
    if (!(policy_.max_radius > 0.0 && policy_.max_radius <= 0.5)) {
      throw DomainError("contour radius cap must lie in (0, 0.5]");
    }
    if (policy_.nodes < 4) throw DomainError("contour needs at least 4 nodes");
    const auto tiles = window_tiles(table_.fundamental_area(), k_lo, k_hi, policy_);
    const std::size_t workers = resolve_workers(policy_.workers);
    inner_workers_ = tiles.size() == 1 ? workers : 1;

    std::vector<std::vector<SectorOutcome>> per_tile(tiles.size());
    const std::vector<bool> all(sectors_.size(), true);
    parallel_for(tiles.size(), workers, [&](std::size_t t) {
      per_tile[t].resize(sectors_.size());
      solve_tile(t, tiles[t].first, tiles[t].second, 1, all, per_tile[t]);
    });

    std::vector<WindowResult> results(sectors_.size());
    for (std::size_t s = 0; s < sectors_.size(); ++s) {
      SpectrumRecord& rec = results[s].record;
      rec.a = table_.shape().a();
      rec.m = sectors_[s].value();
      rec.k_lo = k_lo;
      rec.k_hi = k_hi;
      std::vector<SpectrumEntry> entries;
      std::vector<bim::BoundaryFunction> states;
      std::size_t rejected = 0, contours = 0;
      for (std::size_t t = 0; t < tiles.size(); ++t) {
        const SectorOutcome& o = per_tile[t][s];
        for (std::size_t e = 0; e < o.entries.size(); ++e) {
          if (o.entries[e].k < k_lo || o.entries[e].k > k_hi) continue;
          entries.push_back(o.entries[e]);
          if (policy_.keep_vectors) states.push_back(o.states[e]);
        }
        rec.gaps.insert(rec.gaps.end(), o.gaps.begin(), o.gaps.end());
        rejected += o.rejected_in_keep;
        contours += o.contours;
      }
      const std::vector<std::size_t> kept = merge_levels(entries, policy_.dedupe_tol);
      if (policy_.keep_vectors) {
        for (std::size_t idx : kept) results[s].states.push_back(states[idx]);
      }
      rec.entries = std::move(entries);
      rec.metadata["contours"] = std::to_string(contours);
      rec.metadata["rejected_in_keep"] = std::to_string(rejected);
      rec.metadata["gaps"] = std::to_string(rec.gaps.size());
    }
    return results;
  }

private:
  ArclengthTable table_;
  std::vector<SectorLabel> sectors_;
  WindowPolicy policy_;
  std::size_t inner_workers_ = 1;
};

}  // namespace

std::vector<WindowResult> solve_window_sectors(const BoundaryShape& shape,
                                               const std::vector<SectorLabel>& sectors,
                                               double k_lo, double k_hi,
                                               const WindowPolicy& policy) {
  if (sectors.empty()) throw DomainError("no sectors requested");
  WindowSolver solver(shape, sectors, policy);
  return solver.run(k_lo, k_hi);
}

WindowResult solve_window(const BoundaryShape& shape, SectorLabel m, double k_lo, double k_hi,
                          const WindowPolicy& policy) {
  return std::move(solve_window_sectors(shape, {m}, k_lo, k_hi, policy)[0]);
}

}  // namespace c3b::beyn
