// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Each criterion prints one PASS/FAIL line; the exit status
// is the number of failed criteria.
//
// The a = 0.2 spectra up to k = 320 are read from the chunk cache when
// present and solved otherwise, which takes hours on one core.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "c3b/beyn.hpp"
#include "c3b/bim.hpp"
#include "c3b/classical.hpp"
#include "c3b/error.hpp"
#include "c3b/io.hpp"
#include "c3b/parallel.hpp"
#include "c3b/phasespace.hpp"
#include "c3b/pipeline.hpp"
#include "c3b/stats.hpp"
#include "oracles.hpp"
#include "tangent_oracle.hpp"

using namespace c3b;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double a_default = 0.2;
constexpr double k_top = 320.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double fundamental_area() { return arclength_geometry(BoundaryShape(a_default), 1024).fundamental_area; }

io::RunConfig base_config(std::vector<int> sectors, double lo, double hi) {
  io::RunConfig c;
  c.a = a_default;
  c.sectors = std::move(sectors);
  c.k_lo = lo;
  c.k_hi = hi;
  c.workers = 0;
  return c;
}

// All three sectors of a = 0.2 on [5, 320], with states, loaded once.
const std::vector<pipeline::SectorRun>& deformed_runs() {
  static const auto runs = [] {
    pipeline::ChunkOptions opt;
    opt.width = 10.0;
    opt.keep_states = true;
    opt.log = [](const std::string& s) { std::fprintf(stderr, "  [spectrum] %s\n", s.c_str()); };
    return pipeline::run_spectrum(base_config({0, 1, 2}, 5.0, k_top), C3B_ACCEPTANCE_CACHE, opt);
  }();
  return runs;
}

std::vector<double> levels_in(const SpectrumRecord& r, double lo, double hi) {
  std::vector<double> k;
  for (const auto& e : r.entries)
    if (e.k >= lo && e.k <= hi) k.push_back(e.k);
  return k;
}

// ---------------------------------------------------------------- 1

Outcome circle_oracle() {
  beyn::WindowPolicy p;
  const auto res = beyn::solve_window_sectors(
      BoundaryShape(0.0), {SectorLabel(0), SectorLabel(1), SectorLabel(2)}, 4.0, 40.0, p);
  double worst = 0.0;
  std::string counts;
  bool ok = true;
  for (int m = 0; m < 3; ++m) {
    const auto expect = oracle::circle_levels(m, 4.0, 40.0);
    const auto got = res[static_cast<std::size_t>(m)].record.wavenumbers();
    counts += fmt(" m%d %zu/%zu", m, got.size(), expect.size());
    if (got.size() != expect.size()) {
      ok = false;
      continue;
    }
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - expect[i]));
  }
  ok = ok && worst < 1e-8;
  return {ok, fmt("levels found/expected:%s, max |k - 2 j_ns| = %.2e (tol 1e-8)", counts.c_str(), worst)};
}

// ---------------------------------------------------------------- 2

Outcome residual_floor() {
  const ArclengthTable table{BoundaryShape(a_default)};
  const double center = 100.0, radius = 0.5;
  auto quad = std::make_shared<QuadratureSet>(quadrature_nodes(table, center));
  beyn::MatrixFamily T = [&](cplx z) { return bim::assemble_fredholm(quad, SectorLabel(0), z).entries; };
  // wide enough that the eigenvalues leaking in from outside a coarse contour
  // do not saturate the rank at small N
  const auto V = beyn::probe_matrix(static_cast<Eigen::Index>(quad->size()), 60, 1, {0, 0});
  beyn::ProbeConfig cfg;

  auto solve = [&](int nodes) {
    beyn::Contour c{cplx(center, 0.0), radius, nodes, 0.8};
    return beyn::reduce_and_solve(beyn::contour_moments(T, c, V, resolve_workers(0)), T, c, cfg);
  };
  const auto main = solve(50);
  double worst_kept = 0.0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < main.eigenvalues.size(); ++i) {
    if (!main.kept[i]) continue;
    ++kept;
    worst_kept = std::max(worst_kept, main.residuals[i]);
  }

  // largest residual among eigenvalues inside the keep region
  std::vector<double> sweep;
  for (int n : {8, 12, 16, 20, 24}) {
    double worst = 0.0;
    try {
      const auto r = solve(n);
      for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
        if (std::abs(r.eigenvalues[i] - center) < 0.8 * radius && std::isfinite(r.residuals[i]))
          worst = std::max(worst, r.residuals[i]);
      if (r.eigenvalues.empty()) worst = std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
      worst = std::numeric_limits<double>::infinity();
    }
    sweep.push_back(worst);
  }
  int violations = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (!(sweep[i] < sweep[i - 1])) ++violations;
  std::string s;
  for (double r : sweep) s += fmt(" %.1e", r);
  const bool ok = kept > 0 && worst_kept < 1e-8 && violations <= 1;
  return {ok, fmt("N=50: %zu kept, max residual %.2e (tol 1e-8); N=8..24 residuals%s, %d increases (max 1)",
                  kept, worst_kept, s.c_str(), violations)};
}

// ---------------------------------------------------------------- 3

Outcome weyl_count() {
  const double area = fundamental_area();
  const double perim = arclength_geometry(BoundaryShape(a_default), 1024).fundamental_perimeter;
  bool ok = true;
  std::string d;
  for (int m = 0; m < 3; ++m) {
    const auto k = levels_in(deformed_runs()[static_cast<std::size_t>(m)].record, 5.0, 100.0);
    const auto u = stats::unfold(k, area);
    // staircase N(k_n) = n - 1/2 against A k^2/4pi - L k/4pi + c with c fitted
    std::vector<double> dev(k.size());
    double c = 0.0;
    for (std::size_t n = 0; n < k.size(); ++n) {
      dev[n] = static_cast<double>(n) + 0.5 - (area * k[n] * k[n] - perim * k[n]) / (4 * pi);
      c += dev[n];
    }
    c /= static_cast<double>(k.size());
    double worst = 0.0;
    for (double x : dev) worst = std::max(worst, std::abs(x - c));
    // level count in [5, 100] against the smooth count
    const auto smooth = [&](double x) { return (area * x * x - perim * x) / (4 * pi) + c; };
    const double count_err = static_cast<double>(k.size()) - (smooth(100.0) - smooth(5.0));
    const bool sector_ok = std::abs(u.weyl_ratio - 1.0) < 0.05 && worst <= 3.0 && std::abs(count_err) <= 3.0;
    ok = ok && sector_ok;
    d += fmt("m%d: %zu levels, c2*4pi/A = %.4f, max staircase dev %.2f, count err %+.2f; ", m, k.size(),
             u.weyl_ratio, worst, count_err);
  }
  return {ok, d + "(tol 5%, 3 levels)"};
}

// ---------------------------------------------------------------- 4, 5

struct SectorStats {
  std::size_t levels = 0;
  double ks_goe = 0.0, ks_gue = 0.0;
  stats::RmtLogFit fit;
};

SectorStats sector_stats(int m) {
  const double area = fundamental_area();
  const auto u = stats::unfold(levels_in(deformed_runs()[static_cast<std::size_t>(m)].record, 5.0, 300.0), area);
  SectorStats s;
  s.levels = u.size();
  const auto n = stats::nnls(u, 40);
  s.ks_goe = n.ks_goe;
  s.ks_gue = n.ks_gue;
  std::vector<double> L, d3;
  for (double l = 2.0; l <= 20.0; l += 1.0) {
    L.push_back(l);
    d3.push_back(stats::delta3(u.levels, l, 0.0, resolve_workers(0)));
  }
  s.fit = stats::fit_rmt_log(L, d3, m == 0 ? 1 : 2);
  return s;
}

Outcome spacing_discrimination() {
  const auto g = sector_stats(0), u = sector_stats(1);
  const bool ok = g.ks_goe < 0.04 && g.ks_goe < g.ks_gue && u.ks_gue < 0.04 && u.ks_gue < u.ks_goe;
  return {ok, fmt("m0 (%zu levels): KS_GOE %.4f, KS_GUE %.4f; m1 (%zu levels): KS_GUE %.4f, KS_GOE %.4f (tol 0.04)",
                  g.levels, g.ks_goe, g.ks_gue, u.levels, u.ks_gue, u.ks_goe)};
}

Outcome rigidity() {
  const auto g = sector_stats(0), u = sector_stats(1);
  const auto e = oracle::poisson_levels(100000, 20240101);
  double worst_identity = 0.0;
  for (double L : {2.0, 5.0, 10.0, 15.0, 20.0}) {
    const double direct = stats::delta3(e, L, 0.0, resolve_workers(0));
    worst_identity = std::max(worst_identity, std::abs(stats::delta3_from_sigma2(e, L) / direct - 1.0));
  }
  const double p15 = stats::delta3(e, 15.0, 0.0, resolve_workers(0));
  const bool ok = g.fit.max_deviation <= 0.03 && u.fit.max_deviation <= 0.03 && worst_identity < 0.01 &&
                  std::abs(p15 - 1.0) <= 0.05;
  return {ok, fmt("GOE fit C=%.4f max dev %.4f; GUE fit C=%.4f max dev %.4f (tol 0.03); "
                  "Poisson identity rel err %.4f (tol 0.01), Delta3(15) = %.4f",
                  g.fit.c, g.fit.max_deviation, u.fit.c, u.fit.max_deviation, worst_identity, p15)};
}

// ---------------------------------------------------------------- 6

Outcome saturation() {
  const double area = fundamental_area();
  const std::vector<double> cuts{150.0, 200.0, 250.0, 300.0};
  const auto kg = levels_in(deformed_runs()[0].record, 5.0, 300.0);
  const auto ku = levels_in(deformed_runs()[1].record, 5.0, 300.0);
  const auto fg = stats::rigidity_saturation(kg, area, cuts, 9, stats::two_bounce_length);
  const auto fu = stats::rigidity_saturation(ku, area, cuts, 9, stats::two_bounce_length);
  bool grows = true;
  std::string vals;
  for (const auto* f : {&fg, &fu}) {
    for (std::size_t i = 0; i < f->points.size(); ++i) {
      vals += fmt(" %.4f", f->points[i].delta3_inf);
      if (i > 0 && !(f->points[i].delta3_inf > f->points[i - 1].delta3_inf)) grows = false;
    }
    vals += " |";
  }
  const bool ok = grows && fu.alpha > fg.alpha && fg.alpha >= 1.2 && fg.alpha <= 3.0;
  return {ok, fmt("Delta3_inf GOE/GUE:%s alpha_GOE %.3f (band [1.2, 3.0]), alpha_GUE %.3f",
                  vals.c_str(), fg.alpha, fu.alpha)};
}

// ---------------------------------------------------------------- 7

std::vector<const bim::BoundaryFunction*> nearest_states(int m, double k0, std::size_t count) {
  std::vector<const bim::BoundaryFunction*> out;
  for (const auto& s : deformed_runs()[static_cast<std::size_t>(m)].states) out.push_back(&s);
  std::stable_sort(out.begin(), out.end(), [&](auto* a, auto* b) { return std::abs(a->k - k0) < std::abs(b->k - k0); });
  if (out.size() > count) out.resize(count);
  std::stable_sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->k < b->k; });
  return out;
}

phasespace::HusimiGrid husimi(const bim::BoundaryFunction& f) {
  const auto d = phasespace::default_grid_dims(f.quadrature->fundamental_perimeter, f.k);
  return phasespace::husimi_sector(f, d.nq, d.np);
}

// max |h(q,p) - g(q,-p)| / max h
double mirror_distance(const phasespace::HusimiGrid& h, const phasespace::HusimiGrid& g) {
  double worst = 0, peak = 0;
  for (std::size_t i = 0; i < h.nq; ++i)
    for (std::size_t j = 0; j < h.np; ++j) {
      worst = std::max(worst, std::abs(h.at(i, j) - g.at(i, h.np - 1 - j)));
      peak = std::max(peak, h.at(i, j));
    }
  return worst / peak;
}

Outcome husimi_symmetry() {
  const auto s0 = nearest_states(0, 100.0, 50);
  const auto s1 = nearest_states(1, 100.0, 50);
  const auto s2 = nearest_states(2, 100.0, 50);
  double sym0 = 0.0;
  for (const auto* f : s0) {
    const auto h = husimi(*f);
    sym0 = std::max(sym0, mirror_distance(h, h));
  }
  double mirror = 0.0, da = 0.0;
  std::size_t paired = 0;
  for (const auto* f : s1) {
    const bim::BoundaryFunction* partner = nullptr;
    for (const auto& g : deformed_runs()[2].states)
      if (std::abs(g.k - f->k) < 1e-6) partner = &g;
    if (!partner) continue;
    ++paired;
    const auto h1 = husimi(*f), h2 = husimi(*partner);
    mirror = std::max(mirror, mirror_distance(h1, h2));
    da = std::max(da, std::abs(phasespace::localization_measures(h1).a - phasespace::localization_measures(h2).a));
  }
  const bool ok = s0.size() == 50 && s1.size() == 50 && s2.size() == 50 && paired == s1.size() &&
                  sym0 < 1e-8 && mirror < 1e-6 && da < 1e-3;
  return {ok, fmt("m0 p-asymmetry %.2e (tol 1e-8); %zu/%zu m1 states paired, mirror distance %.2e, max |dA| %.2e (tol 1e-3)",
                  sym0, paired, s1.size(), mirror, da)};
}

// ---------------------------------------------------------------- 8

std::vector<double> entropy_measures(const std::vector<const bim::BoundaryFunction*>& states) {
  std::vector<double> a(states.size());
  parallel_for(states.size(), resolve_workers(0), [&](std::size_t i) {
    a[i] = phasespace::localization_measures(husimi(*states[i])).a;
  });
  return a;
}

Outcome localization() {
  std::vector<const bim::BoundaryFunction*> all;
  for (const auto& s : deformed_runs()[0].states) all.push_back(&s);
  auto window = [&](double lo, double hi) {
    std::vector<const bim::BoundaryFunction*> w;
    for (auto* s : all)
      if (s->k >= lo && s->k < hi) w.push_back(s);
    return w;
  };
  const auto e150 = nearest_states(0, 150.0, 500);
  const auto e300 = nearest_states(0, 300.0, 500);
  const auto f150 = phasespace::beta_fit(entropy_measures(e150));
  const auto f300 = phasespace::beta_fit(entropy_measures(e300));

  std::vector<double> ks, sig;
  std::string pts;
  for (auto [lo, hi] : {std::pair{100.0, 150.0}, {150.0, 200.0}, {200.0, 250.0}, {250.0, 300.0}}) {
    const auto w = window(lo, hi);
    const auto f = phasespace::beta_fit(entropy_measures(w));
    double kmean = 0.0;
    for (auto* s : w) kmean += s->k;
    ks.push_back(kmean / static_cast<double>(w.size()));
    sig.push_back(f.sigma);
    pts += fmt(" (%.0f, %.4f)", ks.back(), sig.back());
  }
  const auto sc = phasespace::scaling_fit(ks, sig);
  const bool ok = e150.size() >= 500 && e300.size() >= 500 && f150.mode() >= 0.55 && f150.mode() <= 0.75 &&
                  f300.mode() >= 0.55 && f300.mode() <= 0.75 && f300.sigma < f150.sigma &&
                  sc.gamma >= 0.15 && sc.gamma <= 0.65;
  return {ok, fmt("k~150: %zu states, mode %.3f, sigma %.4f; k~300: %zu states, mode %.3f, sigma %.4f; "
                  "(k, sigma):%s gamma %.3f (band [0.15, 0.65])",
                  e150.size(), f150.mode(), f150.sigma, e300.size(), f300.mode(), f300.sigma, pts.c_str(), sc.gamma)};
}

// ---------------------------------------------------------------- 9

Outcome classical_suite() {
  const ArclengthTable table{BoundaryShape(a_default)};
  double fd = 0.0;
  for (auto [s, p] : {std::pair{0.05, 0.1}, {0.17, -0.45}, {0.29, 0.62}, {0.11, 0.0}, {0.23, -0.8}})
    fd = std::max(fd, oracle::tangent_fd_error(table, s, p, 20));

  classical::AverageOptions circle_opt;
  circle_opt.samples = 100;
  circle_opt.threshold = -1.0;
  const double circle = classical::average_lyapunov({0.0}, circle_opt).front().mean_all;

  const auto map = classical::lyapunov_heatmap(table, 200, 200, 2000, 0);
  const double chaotic = map.fraction_above(0.1);

  std::vector<double> as;
  for (int i = 0; i <= 7; ++i) as.push_back(0.20 + 0.02 * i);
  classical::AverageOptions opt;
  opt.samples = 500;
  const auto avg = classical::average_lyapunov(as, opt);
  double xm = 0, ym = 0;
  for (const auto& r : avg) {
    xm += r.a;
    ym += r.mean;
  }
  xm /= static_cast<double>(avg.size());
  ym /= static_cast<double>(avg.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (const auto& r : avg) {
    sxy += (r.a - xm) * (r.mean - ym);
    sxx += (r.a - xm) * (r.a - xm);
    syy += (r.mean - ym) * (r.mean - ym);
  }
  const double slope = sxy / sxx;
  const double r2 = sxy * sxy / (sxx * syy);
  std::string means;
  for (const auto& r : avg) means += fmt(" %.4f", r.mean);
  const bool ok = fd < 1e-4 && circle < 0.01 && chaotic >= 0.9 && slope < 0.0 && r2 > 0.9;
  return {ok, fmt("tangent vs FD rel err %.2e (tol 1e-4); a=0 <lambda> %.4f; a=0.2 chaotic cells %.3f; "
                  "<lambda>(a=0.20..0.34):%s slope %.3f R^2 %.3f",
                  fd, circle, chaotic, means.c_str(), slope, r2)};
}

// ---------------------------------------------------------------- 10

int run_cli(const std::string& args) {
  const std::string cmd = std::string(C3B_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = io::read_file(e.path());
  return files;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "c3b_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::map<std::string, std::string>> outputs;
  int failures = 0;
  for (int workers : {1, 2, 3}) {
    const fs::path out = root / ("w" + std::to_string(workers));
    const std::string common = " --seed 7 --workers " + std::to_string(workers) + " --out " + out.string();
    failures += run_cli("spectrum --m 0,1,2 --k 5:80" + common) != 0;
    failures += run_cli("stats --input " + (out / "spectrum_a0.2_m0.csv").string() + common) != 0;
    failures += run_cli("husimi --m 0,1 --k 60:63 --figures 2" + common) != 0;
    failures += run_cli("lyapunov --grid 24x20 --collisions 400" + common) != 0;
    failures += run_cli("report" + common) != 0;
    outputs.push_back(tree(out));
  }
  std::size_t differing = 0;
  for (std::size_t r = 1; r < outputs.size(); ++r) {
    if (outputs[r].size() != outputs[0].size()) ++differing;
    for (const auto& [name, content] : outputs[0]) {
      auto it = outputs[r].find(name);
      if (it == outputs[r].end() || it->second != content) ++differing;
    }
  }
  std::size_t grids = 0, spectra = 0;
  for (const auto& [name, content] : outputs[0]) {
    grids += name.ends_with(".grid");
    spectra += name.starts_with("spectrum_");
  }
  fs::remove_all(root);
  const bool ok = failures == 0 && differing == 0 && grids > 0 && spectra > 0;
  return {ok, fmt("workers 1/2/3: %zu files each (%zu spectra, %zu grids), %d failed commands, %zu differing files",
                  outputs[0].size(), spectra, grids, failures, differing)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"circle oracle completeness", circle_oracle},
      {"residual floor", residual_floor},
      {"Weyl count", weyl_count},
      {"GOE/GUE discrimination", spacing_discrimination},
      {"rigidity", rigidity},
      {"saturation ordering", saturation},
      {"Husimi symmetry", husimi_symmetry},
      {"localization statistics", localization},
      {"classical suite", classical_suite},
      {"determinism", determinism},
  };
  // optional: a list of criterion numbers to run
  std::vector<bool> selected(criteria.size(), argc <= 1);
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n >= 1 && n <= static_cast<int>(criteria.size())) selected[static_cast<std::size_t>(n - 1)] = true;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu %-28s %s  %s [%.0f s]\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed;
}
