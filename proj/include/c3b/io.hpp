// SPDX-License-Identifier: Apache-2.0
//
// Run configuration and on-disk formats.
//
// Spectrum files are text: '#' header lines, a CSV body
// (k,residual,im_k,contour_id,n_nodes), a '# sha256 = ...' line over the body
// and a closing '# end' line. A file without the closing line is truncated.
//
// Grid and state files carry a text header terminated by "end_header\n"
// followed by little-endian IEEE doubles.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "c3b/bim.hpp"
#include "c3b/spectrum.hpp"

namespace c3b::io {

inline constexpr int spectrum_format_version = 1;
inline constexpr int grid_format_version = 1;
inline constexpr int state_format_version = 1;

struct RunConfig {
  double a = 0.2;
  std::vector<int> sectors{0};
  double k_lo = 5.0;
  double k_hi = 100.0;

  // solver
  int nodes = 50;
  double max_radius = 0.5;
  double residual_tol = 1e-6;
  double rank_tol = 1e-10;
  double im_tol = 1e-6;
  std::uint64_t seed = 1;
  double points_per_wavelength = 10.0;

  // stats
  int nnls_bins = 40;
  double l_min = 0.5;
  double l_max = 20.0;
  int l_count = 40;

  // phasespace
  int max_grid_q = 400;
  int max_grid_p = 200;
  double tail_percentile = 2.0;

  // classical
  int grid_s = 200;
  int grid_p = 200;
  int collisions = 2000;

  std::string output_dir = "c3b_out";
  int workers = 0;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Parses a JSON object; keys absent from the file keep the values already in
/// `base`. Unknown keys are a ConfigError.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
RunConfig config_from_json(const std::string& text, RunConfig base = {});
/// Compact single-line JSON with sorted keys.
std::string config_to_json(const RunConfig& config);
/// As config_to_json without the worker count and output directory, which do
/// not affect results. Embedded in every artifact.
std::string provenance_json(const RunConfig& config);

/// Lowercase hex SHA-256.
std::string sha256_hex(const void* data, std::size_t size);
inline std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

/// Writes `content` to `path` through a temporary sibling and a rename, so a
/// failed run never leaves a partial file behind.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// 17 significant digits; round-trips every finite double.
std::string format_double(double x);

std::string spectrum_to_string(const SpectrumRecord& record, const std::string& config_json = {});
void write_spectrum(const std::filesystem::path& path, const SpectrumRecord& record,
                    const std::string& config_json = {});

struct LoadedSpectrum {
  SpectrumRecord record;
  std::string config_json;
  bool checksum_ok = true;
  std::vector<std::string> warnings;
};

/// Throws SchemaError on a version mismatch, malformed rows or truncation.
/// A checksum mismatch is reported through `warnings`.
LoadedSpectrum spectrum_from_string(const std::string& text);
LoadedSpectrum read_spectrum(const std::filesystem::path& path);

/// Union of two records of the same (a, m). Contour ids of `b` are shifted
/// past those of `a` before the merge so that a level found in both is
/// collapsed while degeneracies inside one contour survive.
SpectrumRecord merge_spectra(const SpectrumRecord& a, const SpectrumRecord& b,
                             double tol = 1e-8);

struct GridFile {
  std::size_t nq = 0;
  std::size_t np = 0;
  double q_min = 0.0;
  double q_max = 1.0;
  double p_min = -1.0;
  double p_max = 1.0;
  double a = 0.0;
  double k = 0.0;
  int m = 0;
  std::map<std::string, std::string> metadata;
  /// Row-major over q.
  std::vector<double> values;
};

std::string grid_to_string(const GridFile& grid, const std::string& config_json = {});
void write_grid(const std::filesystem::path& path, const GridFile& grid,
                const std::string& config_json = {});
GridFile grid_from_string(const std::string& bytes);
GridFile read_grid(const std::filesystem::path& path);

/// Boundary functions of one shape. Each state stores (k, m, N, u); the
/// quadrature is rebuilt from (a, N) on load.
std::string states_to_string(double a, const std::vector<bim::BoundaryFunction>& states);
void write_states(const std::filesystem::path& path, double a,
                  const std::vector<bim::BoundaryFunction>& states);
std::vector<bim::BoundaryFunction> states_from_string(const std::string& bytes);
std::vector<bim::BoundaryFunction> read_states(const std::filesystem::path& path);

/// Whole file as bytes; throws SchemaError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace c3b::io
