// SPDX-License-Identifier: Apache-2.0
//
// Spectrum runs split into fixed k chunks. Every chunk is written to the
// cache directory as soon as it is solved and reused by later runs with the
// same solver settings, so long sweeps resume after an interruption.

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "c3b/beyn.hpp"
#include "c3b/bim.hpp"
#include "c3b/io.hpp"
#include "c3b/spectrum.hpp"

namespace c3b::pipeline {

beyn::WindowPolicy window_policy(const io::RunConfig& config);

/// Settings that determine solver output, as compact JSON. Worker count and
/// paths are excluded.
std::string solver_fingerprint(const io::RunConfig& config);

/// Chunk edges: k_lo, the multiples of `width` strictly inside, k_hi.
std::vector<std::pair<double, double>> chunk_edges(double k_lo, double k_hi, double width);

struct SectorRun {
  SpectrumRecord record;
  /// Aligned with record.entries when states were requested.
  std::vector<bim::BoundaryFunction> states;
};

struct ChunkOptions {
  double width = 10.0;
  bool keep_states = false;
  std::function<void(const std::string&)> log;
};

/// Solves config.sectors over [k_lo, k_hi]. Chunks found in `cache_dir` with
/// a matching fingerprint are read instead of recomputed.
std::vector<SectorRun> run_spectrum(const io::RunConfig& config,
                                    const std::filesystem::path& cache_dir,
                                    const ChunkOptions& options = {});

/// File names used for one chunk.
std::filesystem::path chunk_spectrum_path(const std::filesystem::path& dir, double a, int m,
                                          double lo, double hi);
std::filesystem::path chunk_states_path(const std::filesystem::path& dir, double a, int m,
                                        double lo, double hi);

}  // namespace c3b::pipeline
