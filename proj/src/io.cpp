// SPDX-License-Identifier: Apache-2.0
#include "c3b/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <unistd.h>

#include "json.hpp"
#include <openssl/evp.h>

#include "c3b/error.hpp"
#include "c3b/geometry.hpp"

namespace c3b::io {

namespace {

using nlohmann::json;

void check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

double parse_double(std::string_view s, const char* what) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size())
    throw SchemaError(std::string("bad number for ") + what + ": '" + std::string(s) + "'");
  return x;
}

long long parse_int(std::string_view s, const char* what) {
  long long x = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size())
    throw SchemaError(std::string("bad integer for ") + what + ": '" + std::string(s) + "'");
  return x;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// "key = value" -> (key, value)
bool split_assignment(std::string_view line, std::string& key, std::string& value) {
  auto eq = line.find('=');
  if (eq == std::string_view::npos) return false;
  key = std::string(trim(line.substr(0, eq)));
  value = std::string(trim(line.substr(eq + 1)));
  return true;
}

void append_le_double(std::string& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.append(buf, 8);
}

double read_le_double(const char* p) {
  std::uint64_t bits;
  std::memcpy(&bits, p, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<double>(bits);
}

// Splits "<header>end_header\n<payload>".
std::pair<std::string_view, std::string_view> split_header(std::string_view bytes) {
  static constexpr std::string_view marker = "end_header\n";
  auto pos = bytes.find(marker);
  if (pos == std::string_view::npos) throw SchemaError("missing end_header");
  return {bytes.substr(0, pos), bytes.substr(pos + marker.size())};
}

std::map<std::string, std::string> header_fields(std::string_view header) {
  std::map<std::string, std::string> out;
  std::size_t start = 0;
  while (start < header.size()) {
    auto end = header.find('\n', start);
    if (end == std::string_view::npos) end = header.size();
    auto line = trim(header.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    auto sp = line.find(' ');
    std::string key(line.substr(0, sp));
    std::string value = sp == std::string_view::npos ? "" : std::string(trim(line.substr(sp + 1)));
    out[key] = value;
  }
  return out;
}

const std::string& field(const std::map<std::string, std::string>& h, const std::string& key) {
  auto it = h.find(key);
  if (it == h.end()) throw SchemaError("missing header field '" + key + "'");
  return it->second;
}

}  // namespace

void RunConfig::validate() const {
  check(a >= 0.0 && a <= max_deformation, "a must lie in [0, 0.55]");
  check(!sectors.empty(), "at least one sector is required");
  for (int m : sectors) check(m >= 0 && m <= 2, "sectors must be a subset of {0,1,2}");
  check(k_lo > 0.0 && k_hi > k_lo, "k window must satisfy 0 < k_lo < k_hi");
  check(nodes >= 4, "nodes must be at least 4");
  check(max_radius > 0.0, "max_radius must be positive");
  check(residual_tol > 0.0 && rank_tol > 0.0 && im_tol > 0.0, "tolerances must be positive");
  check(points_per_wavelength > 0.0, "points_per_wavelength must be positive");
  check(nnls_bins > 0, "nnls_bins must be positive");
  check(l_min > 0.0 && l_max > l_min && l_count >= 2, "L grid must satisfy 0 < l_min < l_max, l_count >= 2");
  check(max_grid_q >= 16 && max_grid_p >= 16, "grid caps must be at least 16");
  check(tail_percentile >= 0.0 && tail_percentile < 50.0, "tail_percentile must lie in [0, 50)");
  check(grid_s > 0 && grid_p > 0, "classical grid must be non-empty");
  check(collisions >= 100, "collisions must be at least 100");
  check(!output_dir.empty(), "output_dir must not be empty");
  check(workers >= 0, "workers must be non-negative");
}

namespace {

json to_json_object(const RunConfig& c) {
  json j;
  j["a"] = c.a;
  j["sectors"] = c.sectors;
  j["k_lo"] = c.k_lo;
  j["k_hi"] = c.k_hi;
  j["nodes"] = c.nodes;
  j["max_radius"] = c.max_radius;
  j["residual_tol"] = c.residual_tol;
  j["rank_tol"] = c.rank_tol;
  j["im_tol"] = c.im_tol;
  j["seed"] = c.seed;
  j["points_per_wavelength"] = c.points_per_wavelength;
  j["nnls_bins"] = c.nnls_bins;
  j["l_min"] = c.l_min;
  j["l_max"] = c.l_max;
  j["l_count"] = c.l_count;
  j["max_grid_q"] = c.max_grid_q;
  j["max_grid_p"] = c.max_grid_p;
  j["tail_percentile"] = c.tail_percentile;
  j["grid_s"] = c.grid_s;
  j["grid_p"] = c.grid_p;
  j["collisions"] = c.collisions;
  j["output_dir"] = c.output_dir;
  j["workers"] = c.workers;
  return j;
}

template <class T>
void take(const json& j, const char* key, T& out, std::vector<std::string>& seen) {
  if (!j.contains(key)) return;
  seen.emplace_back(key);
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig config_from_json(const std::string& text, RunConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::vector<std::string> seen;
  take(j, "a", c.a, seen);
  take(j, "sectors", c.sectors, seen);
  take(j, "k_lo", c.k_lo, seen);
  take(j, "k_hi", c.k_hi, seen);
  take(j, "nodes", c.nodes, seen);
  take(j, "max_radius", c.max_radius, seen);
  take(j, "residual_tol", c.residual_tol, seen);
  take(j, "rank_tol", c.rank_tol, seen);
  take(j, "im_tol", c.im_tol, seen);
  take(j, "seed", c.seed, seen);
  take(j, "points_per_wavelength", c.points_per_wavelength, seen);
  take(j, "nnls_bins", c.nnls_bins, seen);
  take(j, "l_min", c.l_min, seen);
  take(j, "l_max", c.l_max, seen);
  take(j, "l_count", c.l_count, seen);
  take(j, "max_grid_q", c.max_grid_q, seen);
  take(j, "max_grid_p", c.max_grid_p, seen);
  take(j, "tail_percentile", c.tail_percentile, seen);
  take(j, "grid_s", c.grid_s, seen);
  take(j, "grid_p", c.grid_p, seen);
  take(j, "collisions", c.collisions, seen);
  take(j, "output_dir", c.output_dir, seen);
  take(j, "workers", c.workers, seen);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(seen.begin(), seen.end(), it.key()) == seen.end())
      throw ConfigError("unknown config key '" + it.key() + "'");
  return c;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), std::move(base));
}

std::string config_to_json(const RunConfig& config) { return to_json_object(config).dump(); }

std::string provenance_json(const RunConfig& config) {
  auto j = to_json_object(config);
  j.erase("workers");
  j.erase("output_dir");
  return j.dump();
}

std::string sha256_hex(const void* data, std::size_t size) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data, size, digest, &len, EVP_sha256(), nullptr) != 1)
    throw NumericError("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = hex[digest[i] >> 4];
    out[2 * i + 1] = hex[digest[i] & 15];
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw ResourceError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ResourceError("cannot rename into " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------- spectra

std::string spectrum_to_string(const SpectrumRecord& r, const std::string& config_json) {
  std::string body;
  for (const auto& e : r.entries) {
    body += format_double(e.k);
    body += ',';
    body += format_double(e.residual);
    body += ',';
    body += format_double(e.im_k);
    body += ',';
    body += std::to_string(e.contour_id);
    body += ',';
    body += std::to_string(e.n_nodes);
    body += '\n';
  }
  std::string out;
  out += "# c3b spectrum\n";
  out += "# version = " + std::to_string(spectrum_format_version) + "\n";
  out += "# a = " + format_double(r.a) + "\n";
  out += "# m = " + std::to_string(r.m) + "\n";
  out += "# k_lo = " + format_double(r.k_lo) + "\n";
  out += "# k_hi = " + format_double(r.k_hi) + "\n";
  out += "# levels = " + std::to_string(r.entries.size()) + "\n";
  for (const auto& [lo, hi] : r.gaps) out += "# gap = " + format_double(lo) + "," + format_double(hi) + "\n";
  for (const auto& [key, value] : r.metadata) {
    if (key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos)
      throw DomainError("metadata entries must be single-line and free of '='");
    out += "# meta." + key + " = " + value + "\n";
  }
  if (!config_json.empty()) out += "# config = " + config_json + "\n";
  out += "# columns = k,residual,im_k,contour_id,n_nodes\n";
  out += body;
  out += "# sha256 = " + sha256_hex(body) + "\n";
  out += "# end\n";
  return out;
}

void write_spectrum(const std::filesystem::path& path, const SpectrumRecord& record,
                    const std::string& config_json) {
  write_atomic(path, spectrum_to_string(record, config_json));
}

LoadedSpectrum spectrum_from_string(const std::string& text) {
  LoadedSpectrum out;
  auto& r = out.record;
  bool have_version = false, have_columns = false, ended = false;
  long long declared = -1;
  std::string body, checksum;
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos)
      throw SchemaError("truncated spectrum file: last line has no newline");
    std::string_view line(text.data() + start, end - start);
    start = end + 1;
    ++line_no;
    if (ended) {
      if (!trim(line).empty()) throw SchemaError("content after '# end'");
      continue;
    }
    if (line.starts_with("#")) {
      auto content = trim(line.substr(1));
      if (content == "end") {
        ended = true;
        continue;
      }
      if (content == "c3b spectrum") continue;
      std::string key, value;
      if (!split_assignment(content, key, value)) continue;
      if (key == "version") {
        if (parse_int(value, "version") != spectrum_format_version)
          throw SchemaError("unsupported spectrum format version " + value);
        have_version = true;
      } else if (key == "a") {
        r.a = parse_double(value, "a");
      } else if (key == "m") {
        r.m = static_cast<int>(parse_int(value, "m"));
      } else if (key == "k_lo") {
        r.k_lo = parse_double(value, "k_lo");
      } else if (key == "k_hi") {
        r.k_hi = parse_double(value, "k_hi");
      } else if (key == "levels") {
        declared = parse_int(value, "levels");
      } else if (key == "gap") {
        auto comma = value.find(',');
        if (comma == std::string::npos) throw SchemaError("bad gap line");
        r.gaps.emplace_back(parse_double(std::string_view(value).substr(0, comma), "gap"),
                            parse_double(std::string_view(value).substr(comma + 1), "gap"));
      } else if (key.starts_with("meta.")) {
        r.metadata[key.substr(5)] = value;
      } else if (key == "config") {
        out.config_json = value;
      } else if (key == "columns") {
        if (value != "k,residual,im_k,contour_id,n_nodes")
          throw SchemaError("unexpected column layout '" + value + "'");
        have_columns = true;
      } else if (key == "sha256") {
        checksum = value;
      }
      continue;
    }
    if (!have_version || !have_columns) throw SchemaError("data row before header");
    if (!checksum.empty()) throw SchemaError("data row after checksum");
    std::string_view row = line;
    std::string_view cols[5];
    for (int c = 0; c < 5; ++c) {
      auto comma = row.find(',');
      if ((c < 4) == (comma == std::string_view::npos))
        throw SchemaError("line " + std::to_string(line_no) + ": expected 5 columns");
      cols[c] = row.substr(0, comma);
      row = c < 4 ? row.substr(comma + 1) : std::string_view();
    }
    SpectrumEntry e;
    e.k = parse_double(cols[0], "k");
    e.residual = parse_double(cols[1], "residual");
    e.im_k = parse_double(cols[2], "im_k");
    e.contour_id = static_cast<int>(parse_int(cols[3], "contour_id"));
    e.n_nodes = static_cast<std::size_t>(parse_int(cols[4], "n_nodes"));
    if (!r.entries.empty() && !(e.k >= r.entries.back().k))
      throw SchemaError("line " + std::to_string(line_no) + ": k not sorted");
    r.entries.push_back(e);
    body.append(line.data(), line.size());
    body += '\n';
  }
  if (!ended) throw SchemaError("truncated spectrum file: missing '# end'");
  if (!have_version) throw SchemaError("missing version line");
  if (declared >= 0 && static_cast<std::size_t>(declared) != r.entries.size())
    throw SchemaError("level count does not match header");
  if (checksum.empty()) {
    out.checksum_ok = false;
    out.warnings.push_back("spectrum file has no checksum");
  } else if (checksum != sha256_hex(body)) {
    out.checksum_ok = false;
    out.warnings.push_back("spectrum checksum mismatch");
  }
  return out;
}

LoadedSpectrum read_spectrum(const std::filesystem::path& path) {
  return spectrum_from_string(read_file(path));
}

SpectrumRecord merge_spectra(const SpectrumRecord& a, const SpectrumRecord& b, double tol) {
  if (a.m != b.m || a.a != b.a) throw DomainError("merge_spectra: records differ in (a, m)");
  SpectrumRecord out = a;
  int shift = 0;
  for (const auto& e : a.entries) shift = std::max(shift, e.contour_id + 1);
  for (auto e : b.entries) {
    e.contour_id += shift;
    out.entries.push_back(e);
  }
  merge_levels(out.entries, tol);
  out.k_lo = std::min(a.k_lo, b.k_lo);
  out.k_hi = std::max(a.k_hi, b.k_hi);
  out.gaps.insert(out.gaps.end(), b.gaps.begin(), b.gaps.end());
  std::sort(out.gaps.begin(), out.gaps.end());
  for (const auto& [key, value] : b.metadata)
    if (!out.metadata.count(key)) out.metadata[key] = value;
  return out;
}

// ---------------------------------------------------------------- grids

std::string grid_to_string(const GridFile& g, const std::string& config_json) {
  if (g.values.size() != g.nq * g.np) throw DomainError("grid size does not match nq*np");
  std::string payload;
  payload.reserve(8 * g.values.size());
  for (double v : g.values) append_le_double(payload, v);
  std::string h;
  h += "c3b_grid\n";
  h += "version " + std::to_string(grid_format_version) + "\n";
  h += "nq " + std::to_string(g.nq) + "\n";
  h += "np " + std::to_string(g.np) + "\n";
  h += "q_range " + format_double(g.q_min) + " " + format_double(g.q_max) + "\n";
  h += "p_range " + format_double(g.p_min) + " " + format_double(g.p_max) + "\n";
  h += "a " + format_double(g.a) + "\n";
  h += "k " + format_double(g.k) + "\n";
  h += "m " + std::to_string(g.m) + "\n";
  for (const auto& [key, value] : g.metadata) {
    if (key.find_first_of(" \n") != std::string::npos || value.find('\n') != std::string::npos)
      throw DomainError("grid metadata must be single-line with space-free keys");
    h += "meta." + key + " " + value + "\n";
  }
  if (!config_json.empty()) h += "config " + config_json + "\n";
  h += "payload_sha256 " + sha256_hex(payload) + "\n";
  h += "end_header\n";
  return h + payload;
}

void write_grid(const std::filesystem::path& path, const GridFile& grid,
                const std::string& config_json) {
  write_atomic(path, grid_to_string(grid, config_json));
}

GridFile grid_from_string(const std::string& bytes) {
  auto [header, payload] = split_header(bytes);
  auto h = header_fields(header);
  if (!h.count("c3b_grid")) throw SchemaError("not a grid file");
  if (parse_int(field(h, "version"), "version") != grid_format_version)
    throw SchemaError("unsupported grid format version");
  GridFile g;
  g.nq = static_cast<std::size_t>(parse_int(field(h, "nq"), "nq"));
  g.np = static_cast<std::size_t>(parse_int(field(h, "np"), "np"));
  auto range = [&](const std::string& key, double& lo, double& hi) {
    const auto& v = field(h, key);
    auto sp = v.find(' ');
    if (sp == std::string::npos) throw SchemaError("bad " + key);
    lo = parse_double(std::string_view(v).substr(0, sp), key.c_str());
    hi = parse_double(std::string_view(v).substr(sp + 1), key.c_str());
  };
  range("q_range", g.q_min, g.q_max);
  range("p_range", g.p_min, g.p_max);
  g.a = parse_double(field(h, "a"), "a");
  g.k = parse_double(field(h, "k"), "k");
  g.m = static_cast<int>(parse_int(field(h, "m"), "m"));
  for (const auto& [key, value] : h)
    if (key.starts_with("meta.")) g.metadata[key.substr(5)] = value;
  if (payload.size() != 8 * g.nq * g.np)
    throw SchemaError("grid payload has " + std::to_string(payload.size()) + " bytes, expected " +
                      std::to_string(8 * g.nq * g.np));
  if (sha256_hex(payload.data(), payload.size()) != field(h, "payload_sha256"))
    throw SchemaError("grid payload checksum mismatch");
  g.values.resize(g.nq * g.np);
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = read_le_double(payload.data() + 8 * i);
  return g;
}

GridFile read_grid(const std::filesystem::path& path) { return grid_from_string(read_file(path)); }

// ---------------------------------------------------------------- states

std::string states_to_string(double a, const std::vector<bim::BoundaryFunction>& states) {
  std::string payload;
  for (const auto& s : states) {
    if (!s.quadrature) throw DomainError("state without quadrature");
    append_le_double(payload, s.k);
    append_le_double(payload, static_cast<double>(s.m.value()));
    append_le_double(payload, static_cast<double>(s.u.size()));
    for (Eigen::Index j = 0; j < s.u.size(); ++j) {
      append_le_double(payload, s.u[j].real());
      append_le_double(payload, s.u[j].imag());
    }
  }
  std::string h;
  h += "c3b_states\n";
  h += "version " + std::to_string(state_format_version) + "\n";
  h += "a " + format_double(a) + "\n";
  h += "count " + std::to_string(states.size()) + "\n";
  h += "payload_bytes " + std::to_string(payload.size()) + "\n";
  h += "payload_sha256 " + sha256_hex(payload) + "\n";
  h += "end_header\n";
  return h + payload;
}

void write_states(const std::filesystem::path& path, double a,
                  const std::vector<bim::BoundaryFunction>& states) {
  write_atomic(path, states_to_string(a, states));
}

std::vector<bim::BoundaryFunction> states_from_string(const std::string& bytes) {
  auto [header, payload] = split_header(bytes);
  auto h = header_fields(header);
  if (!h.count("c3b_states")) throw SchemaError("not a state file");
  if (parse_int(field(h, "version"), "version") != state_format_version)
    throw SchemaError("unsupported state format version");
  double a = parse_double(field(h, "a"), "a");
  auto count = static_cast<std::size_t>(parse_int(field(h, "count"), "count"));
  if (payload.size() != static_cast<std::size_t>(parse_int(field(h, "payload_bytes"), "payload_bytes")))
    throw SchemaError("state payload truncated");
  if (sha256_hex(payload.data(), payload.size()) != field(h, "payload_sha256"))
    throw SchemaError("state payload checksum mismatch");

  ArclengthTable table{BoundaryShape(a)};
  std::map<std::size_t, std::shared_ptr<const QuadratureSet>> quads;
  std::vector<bim::BoundaryFunction> out;
  out.reserve(count);
  std::size_t pos = 0;
  auto next = [&]() {
    if (pos + 8 > payload.size()) throw SchemaError("state payload truncated");
    double x = read_le_double(payload.data() + pos);
    pos += 8;
    return x;
  };
  for (std::size_t i = 0; i < count; ++i) {
    bim::BoundaryFunction f;
    f.k = next();
    f.m = SectorLabel(static_cast<int>(next()));
    auto n = static_cast<std::size_t>(next());
    auto& q = quads[n];
    if (!q) q = std::make_shared<const QuadratureSet>(quadrature_with_count(table, n));
    f.quadrature = q;
    f.u.resize(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
      double re = next();
      double im = next();
      f.u[static_cast<Eigen::Index>(j)] = cplx(re, im);
    }
    out.push_back(std::move(f));
  }
  if (pos != payload.size()) throw SchemaError("trailing bytes in state payload");
  return out;
}

std::vector<bim::BoundaryFunction> read_states(const std::filesystem::path& path) {
  return states_from_string(read_file(path));
}

}  // namespace c3b::io
