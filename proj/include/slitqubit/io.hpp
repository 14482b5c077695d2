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

#pragma once

// Text interchange: geometry configs, density matrices, scans, setting
// tables, reports and trajectories. Lengths are meters on disk unless a
// unit suffix says otherwise; numbers are written with 17 significant
// digits so write-then-read is exact.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slitqubit/forward.hpp"
#include "slitqubit/optics.hpp"
#include "slitqubit/povm.hpp"
#include "slitqubit/quantum.hpp"
#include "slitqubit/tomography.hpp"

namespace slitqubit::io {

// "810nm", "40 um", "40µm", "50mm", "0.1m", "1.8f", "f". The f suffix needs a
// focal length. A bare number without unit throws ConfigError.
double parse_length(std::string_view text, std::optional<double> focal_length = std::nullopt);

// Shortest decimal that parses back to the same double.
std::string format_number(double v);

// Key-value text, one "key = value" per line, '#' starts a comment.
// Required keys: lambda, slit_width, slit_offsets (comma separated),
// focal_length, L, z. L and z may be given in units of f ("2f", "1.8f").
OpticalGeometry parse_geometry(std::string_view text);
OpticalGeometry read_geometry(const std::filesystem::path& path);
std::string format_geometry(const OpticalGeometry& g);
void write_geometry(const std::filesystem::path& path, const OpticalGeometry& g);

// Slit-basis label for a given dimension: "l,r", "ll,lr,rl,rr", or
// "s0,s1,..." for qudits.
std::string basis_label(int dim);

// JSON {"dim", "basis", "real", "imag"}. Reading checks the basis tag,
// Hermiticity and unit trace.
std::string format_density(const DensityMatrix& rho);
DensityMatrix parse_density(std::string_view text);
DensityMatrix read_density(const std::filesystem::path& path);
void write_density(const std::filesystem::path& path, const DensityMatrix& rho);

// CSV with header "x_m,value" plus a JSON sidecar next to it (same stem,
// .json extension) carrying the geometry and acquisition metadata.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);
void write_scan(const std::filesystem::path& csv, const ScanRecord& scan);
ScanRecord read_scan(const std::filesystem::path& csv);

// 6x6 CSV, first header cell "B\A", row and column labels as in
// kSettingLabels.
std::string format_setting_table(const SettingTable& t);
SettingTable parse_setting_table(std::string_view text);
SettingTable read_setting_table(const std::filesystem::path& path);
void write_setting_table(const std::filesystem::path& path, const SettingTable& t);

struct Report {
  std::string mode;
  DensityMatrix raw;
  DensityMatrix projected;
  std::string target = "psi-slits";
  double fidelity_raw = 0.0;
  double fidelity_projected = 0.0;
  std::vector<double> residuals;
  std::vector<std::pair<std::string, double>> scalars;
};

std::string format_report(const Report& r);
void write_report(const std::filesystem::path& path, const Report& r);

// Columns x_m, bx, by, bz, azimuth_rad (unwrapped).
std::string format_trajectory(const Trajectory& t);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace slitqubit::io
