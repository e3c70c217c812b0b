// SPDX-License-Identifier: Apache-2.0
//
// c3b: command-line driver for the billiard pipeline.
//
// Exit status: 0 on success, 2 on a configuration or command-line error,
// 1 when a compute stage fails. Outputs are staged in memory and written only
// after the stage succeeds.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "c3b/classical.hpp"
#include "c3b/error.hpp"
#include "c3b/geometry.hpp"
#include "c3b/io.hpp"
#include "c3b/parallel.hpp"
#include "c3b/phasespace.hpp"
#include "c3b/pipeline.hpp"
#include "c3b/stats.hpp"
#include "c3b/svg.hpp"

namespace fs = std::filesystem;
using namespace c3b;

namespace {

struct StageError : std::runtime_error {
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "' failed: " + what) {}
};

// Files are collected here and written together once a stage has finished.
class Artifacts {
public:
  explicit Artifacts(std::string config_json) : config_(std::move(config_json)) {}

  void add(const fs::path& path, std::string content) { files_.emplace_back(path, std::move(content)); }

  // '#' header with provenance, CSV body, checksum, terminator.
  void table(const fs::path& path, const std::string& columns, const std::string& body,
             const std::vector<std::pair<std::string, std::string>>& notes = {}) {
    std::string out = "# c3b table\n# config = " + config_ + "\n";
    for (const auto& [k, v] : notes) out += "# " + k + " = " + v + "\n";
    out += "# columns = " + columns + "\n" + body;
    out += "# sha256 = " + io::sha256_hex(body) + "\n# end\n";
    add(path, std::move(out));
  }

  void figure(const fs::path& path, const std::string& svg) {
    add(path, svg + "<!-- config: " + config_ + " -->\n<!-- sha256: " + io::sha256_hex(svg) + " -->\n");
  }

  const std::string& config() const { return config_; }

  void commit(const fs::path& dir) {
    fs::create_directories(dir);
    for (const auto& [path, content] : files_) io::write_atomic(dir / path, content);
    for (const auto& [path, content] : files_) std::cout << (dir / path).string() << "\n";
  }

private:
  std::string config_;
  std::vector<std::pair<fs::path, std::string>> files_;
};

std::string fmt(double x) { return io::format_double(x); }

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::pair<double, double> parse_range(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError("range '" + s + "' must look like lo:hi");
  try {
    std::size_t p1 = 0, p2 = 0;
    const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
    double lo = std::stod(a, &p1), hi = std::stod(b, &p2);
    if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("trailing");
    return {lo, hi};
  } catch (const std::exception&) {
    throw ConfigError("range '" + s + "' must look like lo:hi");
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t p = 0;
      out.push_back(std::stod(item, &p));
      if (p != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("'" + s + "' is not a comma-separated list of numbers");
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

// Command-line values; unset ones leave the config file or defaults alone.
struct Overrides {
  std::string config_file;
  std::optional<double> a;
  std::optional<std::string> sectors;
  std::optional<std::string> k_window;
  std::optional<int> nodes;
  std::optional<double> ppw;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<int> collisions;
  std::optional<std::string> grid;
  std::optional<int> bins;
};

io::RunConfig resolve(const Overrides& o) {
  io::RunConfig c;
  if (!o.config_file.empty()) c = io::load_config(o.config_file, c);
  if (o.a) c.a = *o.a;
  if (o.sectors) {
    c.sectors.clear();
    for (double m : parse_list(*o.sectors)) {
      if (m != std::floor(m)) throw ConfigError("sectors must be integers");
      c.sectors.push_back(static_cast<int>(m));
    }
  }
  if (o.k_window) std::tie(c.k_lo, c.k_hi) = parse_range(*o.k_window);
  if (o.nodes) c.nodes = *o.nodes;
  if (o.ppw) c.points_per_wavelength = *o.ppw;
  if (o.seed) c.seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  if (o.out) c.output_dir = *o.out;
  if (o.collisions) c.collisions = *o.collisions;
  if (o.bins) c.nnls_bins = *o.bins;
  if (o.grid) {
    auto x = o.grid->find('x');
    try {
      if (x == std::string::npos) throw std::invalid_argument("no x");
      c.grid_s = std::stoi(o.grid->substr(0, x));
      c.grid_p = std::stoi(o.grid->substr(x + 1));
    } catch (const std::exception&) {
      throw ConfigError("grid must look like NSxNP");
    }
  }
  c.validate();
  return c;
}

void log_line(const std::string& s) { std::cerr << "c3b: " << s << "\n"; }

// ------------------------------------------------------------------ stages

void run_geometry(const io::RunConfig& c) {
  Artifacts art(io::provenance_json(c));
  const BoundaryShape shape(c.a);
  const auto g = arclength_geometry(shape, 1024);
  std::string body;
  body += "a," + fmt(c.a) + "\n";
  body += "perimeter," + fmt(g.perimeter) + "\n";
  body += "area," + fmt(g.area) + "\n";
  body += "fundamental_perimeter," + fmt(g.fundamental_perimeter) + "\n";
  body += "fundamental_area," + fmt(g.fundamental_area) + "\n";
  body += "min_radius," + fmt(shape.min_radius()) + "\n";
  art.table("geometry_a" + short_num(c.a) + ".csv", "quantity,value", body);

  svg::Plot plot;
  plot.title = "boundary a = " + short_num(c.a);
  plot.xlabel = "x";
  plot.ylabel = "y";
  svg::Series s;
  for (int i = 0; i <= 720; ++i) {
    const auto p = boundary_point(shape, two_pi * i / 720.0);
    s.x.push_back(p.position.x());
    s.y.push_back(p.position.y());
  }
  plot.series.push_back(s);
  plot.x_range = std::pair(-0.8, 0.8);
  plot.y_range = std::pair(-0.8, 0.8);
  art.figure("boundary_a" + short_num(c.a) + ".svg", svg::render_plot(plot, 480, 480));
  art.commit(c.output_dir);
}

void run_lyapunov(const io::RunConfig& c, const std::string& average, int samples) {
  Artifacts art(io::provenance_json(c));
  if (!average.empty()) {
    classical::AverageOptions opt;
    opt.samples = static_cast<std::size_t>(samples);
    opt.seed = c.seed;
    opt.workers = c.workers;
    const auto res = classical::average_lyapunov(parse_list(average), opt);
    std::string body;
    svg::Series pts;
    pts.style = svg::Style::points;
    pts.label = "chaotic mean";
    for (const auto& r : res) {
      body += fmt(r.a) + "," + fmt(r.mean) + "," + fmt(r.stddev) + "," + fmt(r.mean_all) + "," +
              std::to_string(r.chaotic) + "," + std::to_string(r.drawn) + "\n";
      pts.x.push_back(r.a);
      pts.y.push_back(r.mean);
    }
    art.table("lyapunov_average.csv", "a,mean,stddev,mean_all,chaotic,drawn", body);
    svg::Plot plot;
    plot.title = "average maximal Lyapunov exponent";
    plot.xlabel = "a";
    plot.ylabel = "<lambda_max>";
    plot.series.push_back(pts);
    art.figure("lyapunov_average.svg", svg::render_plot(plot));
    art.commit(c.output_dir);
    return;
  }
  const ArclengthTable table{BoundaryShape(c.a)};
  const auto map = classical::lyapunov_heatmap(table, static_cast<std::size_t>(c.grid_s),
                                               static_cast<std::size_t>(c.grid_p),
                                               static_cast<std::size_t>(c.collisions), c.workers,
                                               0.0, {.seed = c.seed});
  io::GridFile g;
  g.nq = map.ns;
  g.np = map.np;
  g.q_min = 0.0;
  g.q_max = 1.0 / 3.0;
  g.a = c.a;
  g.m = 0;
  g.values = map.values;
  g.metadata["quantity"] = "lyapunov_max";
  g.metadata["collisions"] = std::to_string(c.collisions);
  g.metadata["chaotic_fraction"] = fmt(map.fraction_above(classical::default_chaos_threshold));
  const std::string name = "lyapunov_a" + short_num(c.a);
  art.add(name + ".grid", io::grid_to_string(g, art.config()));
  svg::Image img;
  img.title = "lambda_max, a = " + short_num(c.a);
  img.xlabel = "s / L";
  img.ylabel = "p";
  img.nx = map.ns;
  img.ny = map.np;
  img.values = map.values;
  img.x_max = 1.0 / 3.0;
  img.y_min = -1.0;
  img.missing = classical::heatmap_sentinel;
  art.figure(name + ".svg", svg::render_image(img));
  log_line("chaotic fraction " + g.metadata["chaotic_fraction"]);
  art.commit(c.output_dir);
}

std::vector<pipeline::SectorRun> solve(const io::RunConfig& c, const fs::path& cache, bool states) {
  pipeline::ChunkOptions opt;
  opt.keep_states = states;
  opt.log = log_line;
  return pipeline::run_spectrum(c, cache, opt);
}

void run_spectrum(const io::RunConfig& c, const fs::path& cache) {
  Artifacts art(io::provenance_json(c));
  for (auto& run : solve(c, cache, false)) {
    log_line("m=" + std::to_string(run.record.m) + ": " + std::to_string(run.record.size()) +
             " levels, " + std::to_string(run.record.gaps.size()) + " gaps");
    art.add("spectrum_a" + short_num(c.a) + "_m" + std::to_string(run.record.m) + ".csv",
            io::spectrum_to_string(run.record, art.config()));
  }
  art.commit(c.output_dir);
}

double fundamental_area(double a) {
  return arclength_geometry(BoundaryShape(a), 1024).fundamental_area;
}

void run_stats(const io::RunConfig& c, const std::vector<std::string>& inputs, bool do_nnls,
               bool do_rigidity, const std::string& kmax_list) {
  if (!do_nnls && !do_rigidity && kmax_list.empty()) do_nnls = do_rigidity = true;
  Artifacts art(io::provenance_json(c));
  for (const auto& path : inputs) {
    auto loaded = io::read_spectrum(path);
    for (const auto& w : loaded.warnings) log_line(path + ": " + w);
    const auto& rec = loaded.record;
    const double area = fundamental_area(rec.a);
    const auto unfolded = stats::unfold(rec, area);
    for (const auto& w : unfolded.warnings) log_line(w);
    const std::string tag = "a" + short_num(rec.a) + "_m" + std::to_string(rec.m);
    const int beta = rec.m == 0 ? 1 : 2;

    if (do_nnls) {
      const auto r = stats::nnls(unfolded, static_cast<std::size_t>(c.nnls_bins));
      for (const auto& w : r.warnings) log_line(w);
      std::string body;
      svg::Series hist{"data", {}, {}, "#000000", svg::Style::steps};
      for (std::size_t b = 0; b < r.histogram.density.size(); ++b) {
        const double lo = r.histogram.edges[b], hi = r.histogram.edges[b + 1];
        body += fmt(lo) + "," + fmt(hi) + "," + fmt(r.histogram.density[b]) + "\n";
        hist.x.push_back(lo);
        hist.y.push_back(r.histogram.density[b]);
      }
      hist.x.push_back(r.histogram.edges.back());
      hist.y.push_back(0.0);
      art.table("nnls_" + tag + ".csv", "s_lo,s_hi,density", body,
                {{"spacings", std::to_string(r.count)},
                 {"ks_goe", fmt(r.ks_goe)},
                 {"ks_gue", fmt(r.ks_gue)},
                 {"weyl_ratio", fmt(unfolded.weyl_ratio)}});
      svg::Plot plot;
      plot.title = "spacing distribution, m = " + std::to_string(rec.m);
      plot.xlabel = "s";
      plot.ylabel = "P(s)";
      svg::Series goe{"GOE", {}, {}, "#d62728", svg::Style::line};
      svg::Series gue{"GUE", {}, {}, "#1f77b4", svg::Style::dashed};
      for (int i = 0; i <= 400; ++i) {
        const double s = 4.0 * i / 400.0;
        goe.x.push_back(s);
        goe.y.push_back(stats::goe_surmise(s));
        gue.x.push_back(s);
        gue.y.push_back(stats::gue_surmise(s));
      }
      plot.series = {hist, goe, gue};
      plot.x_range = std::pair(0.0, 4.0);
      art.figure("nnls_" + tag + ".svg", svg::render_plot(plot));
    }

    if (do_rigidity) {
      std::vector<double> Ls, d3, s2;
      const double span = unfolded.levels.back() - unfolded.levels.front();
      for (int i = 0; i < c.l_count; ++i) {
        const double L = c.l_min + (c.l_max - c.l_min) * i / (c.l_count - 1);
        if (3.0 * L > span) break;
        Ls.push_back(L);
        d3.push_back(stats::delta3(unfolded.levels, L, 0.0, resolve_workers(c.workers)));
        s2.push_back(stats::sigma2(unfolded.levels, L));
      }
      if (Ls.empty()) throw DomainError("spectrum too short for the L grid");
      const auto fit = stats::fit_rmt_log(Ls, d3, beta);
      std::string body;
      svg::Series data{"Delta_3", {}, {}, "#000000", svg::Style::points};
      svg::Series theory{beta == 1 ? "GOE asymptote" : "GUE asymptote", {}, {}, "#d62728",
                         svg::Style::dashed};
      for (std::size_t i = 0; i < Ls.size(); ++i) {
        const double rmt = std::log(Ls[i]) / (beta * std::numbers::pi * std::numbers::pi) + fit.c;
        body += fmt(Ls[i]) + "," + fmt(d3[i]) + "," + fmt(s2[i]) + "," + fmt(rmt) + "\n";
        data.x.push_back(Ls[i]);
        data.y.push_back(d3[i]);
        theory.x.push_back(Ls[i]);
        theory.y.push_back(rmt);
      }
      art.table("rigidity_" + tag + ".csv", "L,delta3,sigma2,rmt_asymptote", body,
                {{"beta", std::to_string(beta)}, {"c_beta", fmt(fit.c)},
                 {"max_deviation", fmt(fit.max_deviation)}});
      svg::Plot plot;
      plot.title = "spectral rigidity, m = " + std::to_string(rec.m);
      plot.xlabel = "L";
      plot.ylabel = "Delta_3(L)";
      plot.series = {data, theory};
      plot.vlines.emplace_back(stats::saturation_length(area, rec.entries.back().k), "#2ca02c");
      art.figure("rigidity_" + tag + ".svg", svg::render_plot(plot));
    }

    if (!kmax_list.empty()) {
      const auto fit = stats::rigidity_saturation(rec.wavenumbers(), area, parse_list(kmax_list));
      for (const auto& w : fit.warnings) log_line(w);
      std::string body;
      svg::Series pts{"Delta_3^inf", {}, {}, "#000000", svg::Style::points};
      svg::Series curve{"fit", {}, {}, "#d62728", svg::Style::line};
      for (const auto& p : fit.points) {
        body += fmt(p.k_max) + "," + fmt(p.l_max) + "," + fmt(p.delta3_inf) + "," +
                std::to_string(p.levels) + "," + (p.still_rising ? "1" : "0") + "\n";
        pts.x.push_back(p.k_max);
        pts.y.push_back(p.delta3_inf);
      }
      const double k0 = fit.points.front().k_max, k1 = fit.points.back().k_max;
      for (int i = 0; i <= 100; ++i) {
        const double k = k0 + (k1 - k0) * i / 100.0;
        curve.x.push_back(k);
        curve.y.push_back(fit.c + std::log(k * k) / (fit.alpha * std::numbers::pi * std::numbers::pi));
      }
      art.table("saturation_" + tag + ".csv", "k_max,l_max,delta3_inf,levels,still_rising", body,
                {{"alpha", fmt(fit.alpha)}, {"c", fmt(fit.c)}});
      svg::Plot plot;
      plot.title = "rigidity saturation, m = " + std::to_string(rec.m);
      plot.xlabel = "k_max";
      plot.ylabel = "Delta_3^inf";
      plot.series = {pts, curve};
      art.figure("saturation_" + tag + ".svg", svg::render_plot(plot));
    }
  }
  art.commit(c.output_dir);
}

struct StateSet {
  std::vector<bim::BoundaryFunction> states;
};

StateSet states_for(const io::RunConfig& c, const fs::path& cache) {
  StateSet out;
  for (auto& run : solve(c, cache, true))
    for (auto& s : run.states) out.states.push_back(std::move(s));
  return out;
}

phasespace::GridDims dims_for(const io::RunConfig& c, const bim::BoundaryFunction& f) {
  return phasespace::default_grid_dims(f.quadrature->fundamental_perimeter, f.k,
                                       static_cast<std::size_t>(c.max_grid_q),
                                       static_cast<std::size_t>(c.max_grid_p));
}

void run_husimi(const io::RunConfig& c, const fs::path& cache, int figures) {
  Artifacts art(io::provenance_json(c));
  const auto set = states_for(c, cache);
  std::vector<phasespace::HusimiGrid> grids(set.states.size());
  parallel_for(grids.size(), resolve_workers(c.workers), [&](std::size_t i) {
    const auto d = dims_for(c, set.states[i]);
    grids[i] = phasespace::husimi_sector(set.states[i], d.nq, d.np);
  });
  int drawn = 0;
  std::map<int, int> index;
  for (const auto& h : grids) {
    const int m = h.m.value();
    const std::string name = "husimi_a" + short_num(c.a) + "_m" + std::to_string(m) + "_" +
                             std::to_string(index[m]++);
    io::GridFile g;
    g.nq = h.nq;
    g.np = h.np;
    g.q_max = h.q_max;
    g.a = c.a;
    g.k = h.k;
    g.m = m;
    g.values = h.values;
    g.metadata["quantity"] = "husimi";
    art.add(name + ".grid", io::grid_to_string(g, art.config()));
    if (drawn < figures) {
      svg::Image img;
      img.title = "Husimi m = " + std::to_string(m) + ", k = " + short_num(h.k);
      img.xlabel = "q";
      img.ylabel = "p";
      img.nx = h.nq;
      img.ny = h.np;
      img.values = h.values;
      img.x_max = h.q_max;
      img.y_min = -1.0;
      art.figure(name + ".svg", svg::render_image(img));
      ++drawn;
    }
  }
  log_line(std::to_string(grids.size()) + " Husimi grids");
  art.commit(c.output_dir);
}

void run_localization(const io::RunConfig& c, const fs::path& cache, const std::string& mask_path) {
  Artifacts art(io::provenance_json(c));
  std::optional<classical::Heatmap> mask;
  if (!mask_path.empty()) {
    const auto g = io::read_grid(mask_path);
    mask = classical::Heatmap{g.nq, g.np, g.values};
  }
  const auto set = states_for(c, cache);
  std::vector<phasespace::Localization> loc(set.states.size());
  parallel_for(loc.size(), resolve_workers(c.workers), [&](std::size_t i) {
    const auto d = dims_for(c, set.states[i]);
    const auto h = phasespace::husimi_sector(set.states[i], d.nq, d.np);
    double cells = static_cast<double>(d.nq * d.np);
    if (mask) {
      cells = static_cast<double>(phasespace::chaotic_cells(*mask, classical::default_chaos_threshold, d.nq, d.np));
      if (cells == 0) cells = static_cast<double>(d.nq * d.np);
    }
    loc[i] = phasespace::localization_measures(h.values, cells, cells);
  });
  std::string body;
  std::map<int, std::vector<double>> by_sector;
  for (std::size_t i = 0; i < loc.size(); ++i) {
    const int m = set.states[i].m.value();
    body += fmt(set.states[i].k) + "," + fmt(loc[i].a) + "," + fmt(loc[i].r_ipr) + "," +
            std::to_string(m) + "," + fmt(c.a) + "\n";
    by_sector[m].push_back(loc[i].a);
  }
  art.table("localization_a" + short_num(c.a) + ".csv", "k,A,R,m,a", body);
  std::string fits;
  for (const auto& [m, samples] : by_sector) {
    phasespace::BetaFitOptions opt;
    opt.tail_percentile = c.tail_percentile;
    if (samples.size() < 210) {
      log_line("m=" + std::to_string(m) + ": too few states for a Beta fit");
      continue;
    }
    const auto fit = phasespace::beta_fit(samples, opt);
    fits += std::to_string(m) + "," + fmt(fit.alpha) + "," + fmt(fit.beta) + "," + fmt(fit.a0) +
            "," + fmt(fit.sigma) + "," + fmt(fit.mode()) + "," + std::to_string(fit.sample_count) + "\n";
    const auto hist = stats::histogram(samples, 30, 0.0, 1.0);
    svg::Series h{"P(A)", {}, {}, "#000000", svg::Style::steps};
    for (std::size_t b = 0; b < hist.density.size(); ++b) {
      h.x.push_back(hist.edges[b]);
      h.y.push_back(hist.density[b]);
    }
    h.x.push_back(1.0);
    h.y.push_back(0.0);
    svg::Series beta{"Beta fit", {}, {}, "#d62728", svg::Style::line};
    const double lognorm = std::log(fit.a0) * (fit.alpha + fit.beta - 1.0) +
                           std::lgamma(fit.alpha) + std::lgamma(fit.beta) -
                           std::lgamma(fit.alpha + fit.beta);
    for (int i = 1; i < 400; ++i) {
      const double x = fit.a0 * i / 400.0;
      beta.x.push_back(x);
      beta.y.push_back(std::exp((fit.alpha - 1) * std::log(x) + (fit.beta - 1) * std::log(fit.a0 - x) - lognorm));
    }
    svg::Plot plot;
    plot.title = "P(A), m = " + std::to_string(m);
    plot.xlabel = "A";
    plot.ylabel = "P(A)";
    plot.series = {h, beta};
    plot.x_range = std::pair(0.0, 1.0);
    plot.vlines.emplace_back(fit.mode(), "#2ca02c");
    art.figure("localization_a" + short_num(c.a) + "_m" + std::to_string(m) + ".svg",
               svg::render_plot(plot));
  }
  art.table("beta_fit_a" + short_num(c.a) + ".csv", "m,alpha,beta,A0,sigma,mode,samples", fits);
  art.commit(c.output_dir);
}

void run_report(const io::RunConfig& c) {
  const fs::path dir = c.output_dir;
  if (!fs::is_directory(dir)) throw ConfigError("output directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "report.md") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string md = "# c3b report\n\nconfig: `" + io::provenance_json(c) + "`\n\n";
  md += "| file | bytes | sha256 | summary |\n|---|---|---|---|\n";
  for (const auto& f : files) {
    const std::string bytes = io::read_file(f);
    std::string summary;
    if (f.extension() == ".csv" && f.filename().string().starts_with("spectrum_")) {
      try {
        const auto s = io::spectrum_from_string(bytes);
        summary = std::to_string(s.record.size()) + " levels in [" + short_num(s.record.k_lo) +
                  ", " + short_num(s.record.k_hi) + "], m = " + std::to_string(s.record.m) +
                  (s.checksum_ok ? "" : ", checksum mismatch");
      } catch (const SchemaError& e) {
        summary = std::string("unreadable: ") + e.what();
      }
    } else if (f.extension() == ".grid") {
      try {
        const auto g = io::grid_from_string(bytes);
        summary = std::to_string(g.nq) + " x " + std::to_string(g.np) + " grid";
      } catch (const SchemaError& e) {
        summary = std::string("unreadable: ") + e.what();
      }
    }
    md += "| " + f.filename().string() + " | " + std::to_string(bytes.size()) + " | " +
          io::sha256_hex(bytes).substr(0, 16) + " | " + summary + " |\n";
  }
  io::write_atomic(dir / "report.md", md);
  std::cout << (dir / "report.md").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C3-symmetric billiard: spectra, classical chaos, statistics, phase space"};
  app.require_subcommand(1);
  Overrides o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_file, "JSON configuration file");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--workers", o.workers, "worker threads (0: $C3B_WORKERS or all cores)");
    sub->add_option("--seed", o.seed, "random seed");
  };
  auto shape = [&](CLI::App* sub) { sub->add_option("--a", o.a, "deformation parameter"); };
  auto solver = [&](CLI::App* sub) {
    sub->add_option("--m", o.sectors, "sectors, e.g. 0,1,2");
    sub->add_option("--k", o.k_window, "wavenumber window lo:hi");
    sub->add_option("--nodes", o.nodes, "contour nodes");
    sub->add_option("--ppw", o.ppw, "boundary points per wavelength");
  };

  std::string cache;
  auto* geometry = app.add_subcommand("geometry", "perimeter, area and boundary figure");
  common(geometry);
  shape(geometry);

  std::string average;
  int samples = 1000;
  auto* lyap = app.add_subcommand("lyapunov", "Lyapunov heatmap or deformation sweep");
  common(lyap);
  shape(lyap);
  lyap->add_option("--grid", o.grid, "heatmap size NSxNP");
  lyap->add_option("--collisions", o.collisions, "collisions per trajectory");
  lyap->add_option("--average", average, "comma-separated deformations for the mean exponent");
  lyap->add_option("--samples", samples, "chaotic samples per deformation")->check(CLI::PositiveNumber);

  auto* spectrum = app.add_subcommand("spectrum", "eigen-wavenumbers per sector");
  common(spectrum);
  shape(spectrum);
  solver(spectrum);
  spectrum->add_option("--cache", cache, "chunk cache directory (default <out>/cache)");

  std::vector<std::string> inputs;
  bool do_nnls = false, do_rigidity = false;
  std::string kmax;
  auto* st = app.add_subcommand("stats", "spacing and rigidity statistics of spectrum files");
  common(st);
  st->add_option("--input", inputs, "spectrum file(s)")->required()->check(CLI::ExistingFile);
  st->add_flag("--nnls", do_nnls, "spacing histogram and KS distances");
  st->add_flag("--rigidity", do_rigidity, "Delta_3 and Sigma^2");
  st->add_option("--saturation", kmax, "k_max cuts for the saturation fit, e.g. 150,200,250,300");
  st->add_option("--bins", o.bins, "histogram bins");

  int figures = 4;
  auto* hus = app.add_subcommand("husimi", "Husimi grids of the states in a window");
  common(hus);
  shape(hus);
  solver(hus);
  hus->add_option("--cache", cache, "chunk cache directory (default <out>/cache)");
  hus->add_option("--figures", figures, "number of grids also drawn as SVG");

  std::string mask;
  auto* loc = app.add_subcommand("localization", "entropy localization measures and Beta fits");
  common(loc);
  shape(loc);
  solver(loc);
  loc->add_option("--cache", cache, "chunk cache directory (default <out>/cache)");
  loc->add_option("--lyapunov-mask", mask, "Lyapunov grid file defining chaotic cells")
      ->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "index of the artifacts in the output directory");
  common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  io::RunConfig config;
  try {
    config = resolve(o);
  } catch (const ConfigError& e) {
    std::cerr << "c3b: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "c3b: configuration error: " << e.what() << "\n";
    return 2;
  }
  const fs::path cache_dir = cache.empty() ? fs::path(config.output_dir) / "cache" : fs::path(cache);

  CLI::App* chosen = app.get_subcommands().front();
  const std::string stage = chosen->get_name();
  try {
    if (chosen == geometry) run_geometry(config);
    else if (chosen == lyap) run_lyapunov(config, average, samples);
    else if (chosen == spectrum) run_spectrum(config, cache_dir);
    else if (chosen == st) run_stats(config, inputs, do_nnls, do_rigidity, kmax);
    else if (chosen == hus) run_husimi(config, cache_dir, figures);
    else if (chosen == loc) run_localization(config, cache_dir, mask);
    else if (chosen == report) run_report(config);
  } catch (const ConfigError& e) {
    std::cerr << "c3b: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "c3b: " << StageError(stage, e.what()).what() << "\n";
    return 1;
  }
  return 0;
}
