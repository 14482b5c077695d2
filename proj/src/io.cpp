// Copyright 2026 The slitqubit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slitqubit/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "slitqubit/errors.hpp"

namespace slitqubit::io {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Leading decimal number; returns the count of characters consumed.
std::size_t leading_number(std::string_view s, double& value) {
  const char* begin = s.data();
  if (!s.empty() && s.front() == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
  if (ec != std::errc()) return 0;
  return static_cast<std::size_t>(ptr - s.data());
}

double parse_number(std::string_view text, std::string_view what) {
  const std::string_view t = trim(text);
  double v = 0.0;
  if (t.empty() || leading_number(t, v) != t.size() || !std::isfinite(v)) {
    throw DataError("cannot parse " + std::string(what) + " from '" + std::string(t) + "'");
  }
  return v;
}

const std::vector<std::pair<std::string_view, double>>& unit_table() {
  static const std::vector<std::pair<std::string_view, double>> units = {
      {"nm", 1e-9}, {"um", 1e-6}, {"µm", 1e-6}, {"μm", 1e-6},
      {"mm", 1e-3}, {"cm", 1e-2}, {"m", 1.0}};
  return units;
}

json matrix_to_json(const ComplexMatrix& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(row);
  }
  return rows;
}

json density_to_json(const DensityMatrix& rho) {
  return json{{"dim", rho.dim()},
              {"basis", basis_label(rho.dim())},
              {"real", matrix_to_json(rho.matrix(), false)},
              {"imag", matrix_to_json(rho.matrix(), true)}};
}

DensityMatrix density_from_json(const json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    if (dim < 2) throw DataError("density matrix: dim must be at least 2");
    const std::string basis = j.at("basis").get<std::string>();
    if (basis != basis_label(dim)) {
      throw DataError("density matrix: basis '" + basis + "' does not match expected '" +
                      basis_label(dim) + "'");
    }
    const json& re = j.at("real");
    const json& im = j.at("imag");
    if (re.size() != static_cast<std::size_t>(dim) || im.size() != static_cast<std::size_t>(dim)) {
      throw DimensionMismatch("density matrix: expected " + std::to_string(dim) + " rows");
    }
    ComplexMatrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
      if (re[r].size() != static_cast<std::size_t>(dim) ||
          im[r].size() != static_cast<std::size_t>(dim)) {
        throw DimensionMismatch("density matrix: row " + std::to_string(r) + " has wrong length");
      }
      for (int c = 0; c < dim; ++c) m(r, c) = cplx(re[r][c].get<double>(), im[r][c].get<double>());
    }
    return DensityMatrix(m);
  } catch (const json::exception& e) {
    throw DataError(std::string("density matrix: ") + e.what());
  }
}

json geometry_to_json(const OpticalGeometry& g) {
  return json{{"lambda_m", g.wavelength},         {"slit_width_m", g.slit_width},
              {"slit_offsets_m", g.slit_offsets}, {"focal_length_m", g.focal_length},
              {"L_m", g.slit_to_lens},            {"z_m", g.lens_to_detector}};
}

OpticalGeometry geometry_from_json(const json& j) {
  OpticalGeometry g;
  g.wavelength = j.at("lambda_m").get<double>();
  g.slit_width = j.at("slit_width_m").get<double>();
  g.slit_offsets = j.at("slit_offsets_m").get<std::vector<double>>();
  g.focal_length = j.at("focal_length_m").get<double>();
  g.slit_to_lens = j.at("L_m").get<double>();
  g.lens_to_detector = j.at("z_m").get<double>();
  g.validate();
  return g;
}

std::string row_csv(std::initializer_list<double> values) {
  std::string line;
  for (double v : values) {
    if (!line.empty()) line += ',';
    line += format_number(v);
  }
  return line + '\n';
}

std::string normalize_label(std::string_view label) {
  std::string s(trim(label));
  const std::string ket = "⟩";
  for (std::size_t pos; (pos = s.find(ket)) != std::string::npos;) s.replace(pos, ket.size(), ">");
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  return s;
}

}  // namespace

double parse_length(std::string_view text, std::optional<double> focal_length) {
  const std::string_view t = trim(text);
  if (t == "f") return parse_length("1f", focal_length);
  double v = 0.0;
  const std::size_t n = leading_number(t, v);
  if (n == 0 || !std::isfinite(v)) {
    throw ConfigError("cannot parse length '" + std::string(t) + "'");
  }
  const std::string_view unit = trim(t.substr(n));
  if (unit.empty()) {
    throw ConfigError("length '" + std::string(t) + "' needs a unit (nm, um, mm, cm, m or f)");
  }
  if (unit == "f") {
    if (!focal_length) {
      throw ConfigError("length '" + std::string(t) + "' is relative to f but no focal length is known");
    }
    return v * *focal_length;
  }
  for (const auto& [name, scale] : unit_table()) {
    if (unit == name) return v * scale;
  }
  throw ConfigError("unknown unit '" + std::string(unit) + "' in '" + std::string(t) + "'");
}

std::string format_number(double v) {
  char buf[32];
  for (int digits = 12; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (digits == 17 || std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// ---------------------------------------------------------------------------
// Geometry

OpticalGeometry parse_geometry(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  int line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == line.npos) {
      throw ConfigError("geometry line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (kv.count(key) != 0) throw ConfigError("geometry: duplicate key '" + key + "'");
    kv.emplace(key, std::string(trim(line.substr(eq + 1))));
  }
  static const std::array<std::string_view, 6> required = {"lambda", "slit_width", "slit_offsets",
                                                           "focal_length", "L", "z"};
  for (const auto& key : required) {
    if (kv.count(key) == 0) throw ConfigError("geometry: missing key '" + std::string(key) + "'");
  }
  for (const auto& [key, value] : kv) {
    if (std::find(required.begin(), required.end(), key) == required.end()) {
      throw ConfigError("geometry: unknown key '" + key + "'");
    }
  }
  OpticalGeometry g;
  g.wavelength = parse_length(kv.find("lambda")->second);
  g.slit_width = parse_length(kv.find("slit_width")->second);
  g.focal_length = parse_length(kv.find("focal_length")->second);
  for (std::string_view item : split(kv.find("slit_offsets")->second, ',')) {
    g.slit_offsets.push_back(parse_length(item));
  }
  g.slit_to_lens = parse_length(kv.find("L")->second, g.focal_length);
  g.lens_to_detector = parse_length(kv.find("z")->second, g.focal_length);
  try {
    g.validate();
  } catch (const InvalidGeometry& e) {
    throw ConfigError(e.what());
  }
  return g;
}

OpticalGeometry read_geometry(const std::filesystem::path& path) {
  return parse_geometry(read_text(path));
}

std::string format_geometry(const OpticalGeometry& g) {
  std::string out;
  out += "lambda = " + format_number(g.wavelength) + " m\n";
  out += "slit_width = " + format_number(g.slit_width) + " m\n";
  out += "slit_offsets = ";
  for (std::size_t i = 0; i < g.slit_offsets.size(); ++i) {
    out += (i ? ", " : "") + format_number(g.slit_offsets[i]) + " m";
  }
  out += "\nfocal_length = " + format_number(g.focal_length) + " m\n";
  out += "L = " + format_number(g.slit_to_lens) + " m\n";
  out += "z = " + format_number(g.lens_to_detector) + " m\n";
  return out;
}

void write_geometry(const std::filesystem::path& path, const OpticalGeometry& g) {
  write_text(path, format_geometry(g));
}

// ---------------------------------------------------------------------------
// Density matrices

std::string basis_label(int dim) {
  if (dim == 2) return "l,r";
  if (dim == 4) return "ll,lr,rl,rr";
  std::string out;
  for (int i = 0; i < dim; ++i) out += (i ? ",s" : "s") + std::to_string(i);
  return out;
}

std::string format_density(const DensityMatrix& rho) { return density_to_json(rho).dump(2) + "\n"; }

DensityMatrix parse_density(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("density matrix: ") + e.what());
  }
  return density_from_json(j);
}

DensityMatrix read_density(const std::filesystem::path& path) { return parse_density(read_text(path)); }

void write_density(const std::filesystem::path& path, const DensityMatrix& rho) {
  write_text(path, format_density(rho));
}

// ---------------------------------------------------------------------------
// Scans

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  return p.replace_extension(".json");
}

void write_scan(const std::filesystem::path& csv, const ScanRecord& scan) {
  std::string body = "x_m,value\n";
  for (const ScanSample& s : scan.samples) body += row_csv({s.x, s.value});
  write_text(csv, body);
  json meta{{"kind", scan.kind == ScanKind::kCounts ? "counts" : "probability_density"},
            {"geometry", geometry_to_json(scan.geometry)},
            {"total_shots", scan.total_shots},
            {"seed", scan.seed},
            {"detector_width_m", scan.detector_width},
            {"accidental_rate", scan.accidental_rate},
            {"arm_b_x_m", scan.arm_b_x ? json(*scan.arm_b_x) : json(nullptr)}};
  write_text(sidecar_path(csv), meta.dump(2) + "\n");
}

ScanRecord read_scan(const std::filesystem::path& csv) {
  ScanRecord scan;
  const std::string body = read_text(csv);
  const auto lines = split(body, '\n');
  if (lines.empty() || trim(lines[0]) != "x_m,value") {
    throw DataError(csv.string() + ": expected header 'x_m,value'");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2) {
      throw DataError(csv.string() + ": line " + std::to_string(i + 1) + " needs two columns");
    }
    scan.samples.push_back({parse_number(cells[0], "x"), parse_number(cells[1], "value")});
  }
  const std::filesystem::path side = sidecar_path(csv);
  try {
    const json meta = json::parse(read_text(side));
    const std::string kind = meta.at("kind").get<std::string>();
    if (kind == "counts") {
      scan.kind = ScanKind::kCounts;
    } else if (kind == "probability_density") {
      scan.kind = ScanKind::kProbabilityDensity;
    } else {
      throw DataError(side.string() + ": unknown kind '" + kind + "'");
    }
    scan.geometry = geometry_from_json(meta.at("geometry"));
    scan.total_shots = meta.value("total_shots", std::uint64_t{0});
    scan.seed = meta.value("seed", std::uint64_t{0});
    scan.detector_width = meta.value("detector_width_m", 0.0);
    scan.accidental_rate = meta.value("accidental_rate", 0.0);
    if (meta.contains("arm_b_x_m") && !meta.at("arm_b_x_m").is_null()) {
      scan.arm_b_x = meta.at("arm_b_x_m").get<double>();
    }
  } catch (const json::exception& e) {
    throw DataError(side.string() + ": " + e.what());
  } catch (const InvalidGeometry& e) {
    throw DataError(side.string() + ": " + e.what());
  }
  scan.validate();
  return scan;
}

// ---------------------------------------------------------------------------
// Setting tables

std::string format_setting_table(const SettingTable& t) {
  std::string out = "B\\A";
  for (const auto& label : kSettingLabels) out += "," + label;
  out += '\n';
  for (int b = 0; b < kSettingCount; ++b) {
    out += kSettingLabels[b];
    for (int a = 0; a < kSettingCount; ++a) out += "," + format_number(t.p[b][a]);
    out += '\n';
  }
  return out;
}

SettingTable parse_setting_table(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::string_view line : split(text, '\n')) {
    if (!trim(line).empty()) lines.push_back(trim(line));
  }
  if (lines.size() != kSettingCount + 1) {
    throw DataError("setting table: expected a header and 6 rows, got " +
                    std::to_string(lines.size()) + " lines");
  }
  const auto header = split(lines[0], ',');
  if (header.size() != kSettingCount + 1) throw DataError("setting table: header needs 7 cells");
  for (int a = 0; a < kSettingCount; ++a) {
    if (normalize_label(header[a + 1]) != kSettingLabels[a]) {
      throw DataError("setting table: column " + std::to_string(a + 1) + " is '" +
                      std::string(header[a + 1]) + "', expected '" + kSettingLabels[a] + "'");
    }
  }
  SettingTable t;
  for (int b = 0; b < kSettingCount; ++b) {
    const auto cells = split(lines[b + 1], ',');
    if (cells.size() != kSettingCount + 1) {
      throw DataError("setting table: row " + std::to_string(b + 1) + " needs 7 cells");
    }
    if (normalize_label(cells[0]) != kSettingLabels[b]) {
      throw DataError("setting table: row label '" + std::string(cells[0]) + "', expected '" +
                      kSettingLabels[b] + "'");
    }
    for (int a = 0; a < kSettingCount; ++a) t.p[b][a] = parse_number(cells[a + 1], "probability");
  }
  return t;
}

SettingTable read_setting_table(const std::filesystem::path& path) {
  return parse_setting_table(read_text(path));
}

void write_setting_table(const std::filesystem::path& path, const SettingTable& t) {
  write_text(path, format_setting_table(t));
}

// ---------------------------------------------------------------------------
// Reports and trajectories

std::string format_report(const Report& r) {
  json j{{"mode", r.mode},
         {"raw", density_to_json(r.raw)},
         {"projected", density_to_json(r.projected)},
         {"target", r.target},
         {"fidelity_raw", r.fidelity_raw},
         {"fidelity_projected", r.fidelity_projected},
         {"residuals", r.residuals}};
  for (const auto& [key, value] : r.scalars) j[key] = value;
  return j.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const Report& r) {
  write_text(path, format_report(r));
}

std::string format_trajectory(const Trajectory& t) {
  std::string out = "x_m,bx,by,bz,azimuth_rad\n";
  const std::vector<double> phase = unwrap_azimuth(t.points);
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    const auto& p = t.points[i];
    out += row_csv({p.x, p.bloch.bx, p.bloch.by, p.bloch.bz, phase[i]});
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace slitqubit::io
