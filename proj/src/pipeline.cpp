// SPDX-License-Identifier: Apache-2.0
#include "c3b/pipeline.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "c3b/error.hpp"

namespace c3b::pipeline {

namespace fs = std::filesystem;

beyn::WindowPolicy window_policy(const io::RunConfig& c) {
  beyn::WindowPolicy p;
  p.nodes = c.nodes;
  p.max_radius = c.max_radius;
  p.residual_tol = c.residual_tol;
  p.rank_tol = c.rank_tol;
  p.im_tol = c.im_tol;
  p.seed = c.seed;
  p.points_per_wavelength = c.points_per_wavelength;
  p.workers = c.workers;
  return p;
}

std::string solver_fingerprint(const io::RunConfig& c) {
  nlohmann::json j;
  j["a"] = c.a;
  j["nodes"] = c.nodes;
  j["max_radius"] = c.max_radius;
  j["residual_tol"] = c.residual_tol;
  j["rank_tol"] = c.rank_tol;
  j["im_tol"] = c.im_tol;
  j["seed"] = c.seed;
  j["points_per_wavelength"] = c.points_per_wavelength;
  return j.dump();
}

std::vector<std::pair<double, double>> chunk_edges(double k_lo, double k_hi, double width) {
  if (!(width > 0.0) || !(k_hi > k_lo)) throw DomainError("chunk_edges: empty window or width");
  std::vector<std::pair<double, double>> out;
  double lo = k_lo;
  double next = (std::floor(k_lo / width) + 1.0) * width;
  while (next < k_hi) {
    out.emplace_back(lo, next);
    lo = next;
    next += width;
  }
  out.emplace_back(lo, k_hi);
  return out;
}

namespace {

std::string tag(double a, int m, double lo, double hi) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "a%.6g_m%d_k%.6g-%.6g", a, m, lo, hi);
  return buf;
}

}  // namespace

fs::path chunk_spectrum_path(const fs::path& dir, double a, int m, double lo, double hi) {
  return dir / ("spectrum_" + tag(a, m, lo, hi) + ".csv");
}

fs::path chunk_states_path(const fs::path& dir, double a, int m, double lo, double hi) {
  return dir / ("states_" + tag(a, m, lo, hi) + ".bin");
}

std::vector<SectorRun> run_spectrum(const io::RunConfig& config, const fs::path& cache_dir,
                                    const ChunkOptions& options) {
  config.validate();
  fs::create_directories(cache_dir);
  const std::string fingerprint = solver_fingerprint(config);
  const beyn::WindowPolicy base = window_policy(config);
  const auto chunks = chunk_edges(config.k_lo, config.k_hi, options.width);
  const std::size_t ns = config.sectors.size();

  // Concatenated per sector, contour ids shifted per chunk.
  std::vector<std::vector<SpectrumEntry>> entries(ns);
  std::vector<std::vector<bim::BoundaryFunction>> states(ns);
  std::vector<std::vector<std::pair<double, double>>> gaps(ns);
  std::vector<int> id_shift(ns, 0);

  for (const auto& [lo, hi] : chunks) {
    std::vector<SectorLabel> todo;
    std::vector<std::size_t> todo_index;
    std::vector<SpectrumRecord> chunk_records(ns);
    std::vector<std::vector<bim::BoundaryFunction>> chunk_states(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      const int m = config.sectors[s];
      const auto sp = chunk_spectrum_path(cache_dir, config.a, m, lo, hi);
      const auto st = chunk_states_path(cache_dir, config.a, m, lo, hi);
      bool cached = false;
      if (fs::exists(sp) && (!options.keep_states || fs::exists(st))) {
        try {
          auto loaded = io::read_spectrum(sp);
          if (loaded.checksum_ok && loaded.record.metadata["solver"] == fingerprint) {
            chunk_records[s] = std::move(loaded.record);
            if (options.keep_states) chunk_states[s] = io::read_states(st);
            cached = chunk_states[s].size() == chunk_records[s].size() || !options.keep_states;
          }
        } catch (const SchemaError&) {
          cached = false;
        }
      }
      if (!cached) {
        todo.push_back(SectorLabel(m));
        todo_index.push_back(s);
      }
    }
    if (!todo.empty()) {
      if (options.log) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "solving k in [%.6g, %.6g] for %zu sector(s)", lo, hi,
                      todo.size());
        options.log(buf);
      }
      beyn::WindowPolicy policy = base;
      policy.keep_vectors = true;
      auto results = beyn::solve_window_sectors(BoundaryShape(config.a), todo, lo, hi, policy);
      for (std::size_t f = 0; f < todo.size(); ++f) {
        const std::size_t s = todo_index[f];
        auto& rec = results[f].record;
        rec.metadata["solver"] = fingerprint;
        io::write_states(chunk_states_path(cache_dir, config.a, rec.m, lo, hi), config.a,
                         results[f].states);
        io::write_spectrum(chunk_spectrum_path(cache_dir, config.a, rec.m, lo, hi), rec);
        chunk_records[s] = std::move(rec);
        chunk_states[s] = std::move(results[f].states);
      }
    }
    for (std::size_t s = 0; s < ns; ++s) {
      int max_id = 0;
      for (auto e : chunk_records[s].entries) {
        max_id = std::max(max_id, e.contour_id);
        e.contour_id += id_shift[s];
        entries[s].push_back(e);
      }
      id_shift[s] += max_id + 1;
      if (options.keep_states) {
        for (auto& f : chunk_states[s]) states[s].push_back(std::move(f));
      }
      gaps[s].insert(gaps[s].end(), chunk_records[s].gaps.begin(), chunk_records[s].gaps.end());
    }
  }

  std::vector<SectorRun> out(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    auto kept = merge_levels(entries[s], base.dedupe_tol);
    SpectrumRecord& rec = out[s].record;
    rec.a = config.a;
    rec.m = config.sectors[s];
    rec.k_lo = config.k_lo;
    rec.k_hi = config.k_hi;
    rec.entries = std::move(entries[s]);
    rec.gaps = std::move(gaps[s]);
    rec.metadata["solver"] = fingerprint;
    rec.metadata["chunks"] = std::to_string(chunks.size());
    rec.metadata["gaps"] = std::to_string(rec.gaps.size());
    if (options.keep_states) {
      for (std::size_t idx : kept) out[s].states.push_back(std::move(states[s][idx]));
    }
  }
  return out;
}

}  // namespace c3b::pipeline
