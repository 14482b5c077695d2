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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "slitqubit/errors.hpp"
#include "slitqubit/fixtures.hpp"
#include "slitqubit/io.hpp"
#include "support.hpp"

using namespace slitqubit;
using slitqubit::testing::Gen;
namespace fs = std::filesystem;

namespace {

constexpr const char* kReferenceConfig = R"(# 40 um slits, 150 um apart
lambda = 810 nm
slit_width = 40 um
slit_offsets = -75 um, 75 um
focal_length = 50 mm
L = 2f
z = 1.8f   # intermediate plane
)";

class TempDir {
 public:
  TempDir() {
    Gen gen(static_cast<std::uint64_t>(std::hash<std::string>{}(fs::current_path().string())));
    path_ = fs::temp_directory_path() / ("slitqubit-io-" + std::to_string(gen.integer(0, 1 << 30)));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string without_line(std::string text, const std::string& key) {
  const auto pos = text.find("\n" + key + " ");
  const auto end = text.find('\n', pos + 1);
  return text.erase(pos, end - pos);
}

}  // namespace

TEST_CASE("lengths with units") {
  CHECK(io::parse_length("810nm") == doctest::Approx(810e-9).epsilon(1e-15));
  CHECK(io::parse_length(" 40 um ") == doctest::Approx(40e-6).epsilon(1e-15));
  CHECK(io::parse_length("40µm") == doctest::Approx(40e-6).epsilon(1e-15));
  CHECK(io::parse_length("50mm") == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(io::parse_length("2.5cm") == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(io::parse_length("0.1m") == 0.1);
  CHECK(io::parse_length("-75um") == doctest::Approx(-75e-6).epsilon(1e-15));
  CHECK(io::parse_length("1.8f", 0.05) == doctest::Approx(0.09).epsilon(1e-15));
  CHECK(io::parse_length("f", 0.05) == 0.05);
  CHECK_THROWS_AS(io::parse_length("1.8f"), ConfigError);
  CHECK_THROWS_AS(io::parse_length("40"), ConfigError);
  CHECK_THROWS_AS(io::parse_length("40 furlongs"), ConfigError);
  CHECK_THROWS_AS(io::parse_length("um"), ConfigError);
  CHECK_THROWS_AS(io::parse_length(""), ConfigError);
}

TEST_CASE("numbers round-trip through text") {
  Gen gen(1);
  for (int t = 0; t < 1000; ++t) {
    const double v = gen.normal() * std::pow(10.0, gen.integer(-12, 6));
    CHECK(std::strtod(io::format_number(v).c_str(), nullptr) == v);
  }
  CHECK(io::format_number(0.5) == "0.5");
  CHECK(io::format_number(810e-9) == "8.1e-07");
}

TEST_CASE("geometry config") {
  const OpticalGeometry g = io::parse_geometry(kReferenceConfig);
  const OpticalGeometry ref = OpticalGeometry::reference_double_slit();
  CHECK(g.wavelength == doctest::Approx(ref.wavelength).epsilon(1e-15));
  CHECK(g.slit_width == doctest::Approx(ref.slit_width).epsilon(1e-15));
  REQUIRE(g.slit_offsets.size() == 2);
  CHECK(g.slit_offsets[0] == doctest::Approx(-75e-6).epsilon(1e-15));
  CHECK(g.slit_to_lens == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(g.lens_to_detector == doctest::Approx(0.09).epsilon(1e-15));

  const OpticalGeometry back = io::parse_geometry(io::format_geometry(g));
  CHECK(back.wavelength == g.wavelength);
  CHECK(back.slit_offsets == g.slit_offsets);
  CHECK(back.focal_length == g.focal_length);
  CHECK(back.slit_to_lens == g.slit_to_lens);
  CHECK(back.lens_to_detector == g.lens_to_detector);

  for (const std::string key : {"lambda", "slit_width", "slit_offsets", "focal_length", "L", "z"}) {
    std::string text = "\n" + std::string(kReferenceConfig);
    text = without_line(text, key);
    try {
      io::parse_geometry(text);
      FAIL("missing key accepted: " << key);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("'" + key + "'") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(io::parse_geometry(std::string(kReferenceConfig) + "colour = red\n"), ConfigError);
  CHECK_THROWS_AS(io::parse_geometry(std::string(kReferenceConfig) + "z = 1.5f\n"), ConfigError);
  CHECK_THROWS_AS(io::parse_geometry(std::string(kReferenceConfig) + "nonsense\n"), ConfigError);
  // Detector beyond the image plane.
  std::string far = kReferenceConfig;
  far.replace(far.find("z = 1.8f"), 8, "z = 3f");
  CHECK_THROWS_AS(io::parse_geometry(far), ConfigError);
}

TEST_CASE("density matrices round-trip exactly") {
  Gen gen(2);
  for (int dim : {2, 4, 3}) {
    for (int t = 0; t < 20; ++t) {
      const DensityMatrix rho = gen.density(dim);
      const DensityMatrix back = io::parse_density(io::format_density(rho));
      CHECK(back.matrix() == rho.matrix());
    }
  }
  nlohmann::json j = nlohmann::json::parse(io::format_density(DensityMatrix::maximally_mixed(2)));
  CHECK(j.at("basis") == "l,r");
  j["basis"] = "ll,lr,rl,rr";
  CHECK_THROWS_AS(io::parse_density(j.dump()), DataError);
  CHECK_THROWS_AS(io::parse_density("{not json"), DataError);
  CHECK(io::basis_label(3) == "s0,s1,s2");

  nlohmann::json bad = nlohmann::json::parse(io::format_density(DensityMatrix::maximally_mixed(2)));
  bad["real"][0][0] = 0.9;
  CHECK_THROWS(io::parse_density(bad.dump()));
}

TEST_CASE("scans round-trip through csv and sidecar") {
  TempDir dir;
  const OpticalGeometry g = OpticalGeometry::reference_double_slit();
  SimulationOptions o;
  o.seed = 17;
  o.detector_width = 20e-6;
  o.accidental_rate = 1.5;
  ScanRecord s = simulate_scan(DensityMatrix::maximally_mixed(2), g, scan_grid(g, 2.5), o);
  s.arm_b_x = -1.25e-5;
  const fs::path csv = dir / "scan.csv";
  io::write_scan(csv, s);
  CHECK(fs::exists(dir / "scan.json"));
  CHECK(io::sidecar_path(csv) == dir / "scan.json");
  const ScanRecord back = io::read_scan(csv);
  CHECK(back.xs() == s.xs());
  CHECK(back.values() == s.values());
  CHECK(back.kind == ScanKind::kCounts);
  CHECK(back.seed == 17);
  CHECK(back.total_shots == s.total_shots);
  CHECK(back.detector_width == s.detector_width);
  CHECK(back.accidental_rate == s.accidental_rate);
  CHECK(back.arm_b_x == s.arm_b_x);
  CHECK(back.geometry.lens_to_detector == g.lens_to_detector);

  ScanRecord dens = to_probability_density(s);
  dens.arm_b_x.reset();
  io::write_scan(dir / "dens.csv", dens);
  const ScanRecord dback = io::read_scan(dir / "dens.csv");
  CHECK(dback.kind == ScanKind::kProbabilityDensity);
  CHECK(dback.values() == dens.values());
  CHECK(!dback.arm_b_x);

  io::write_text(dir / "bad.csv", "x,y\n0,1\n");
  CHECK_THROWS_AS(io::read_scan(dir / "bad.csv"), DataError);
  io::write_text(dir / "orphan.csv", "x_m,value\n0,1\n");
  CHECK_THROWS_AS(io::read_scan(dir / "orphan.csv"), IoError);
  CHECK_THROWS_AS(io::read_text(dir / "missing.csv"), IoError);
}

TEST_CASE("setting tables") {
  const SettingTable t = fixtures::pauli_probabilities();
  const std::string text = io::format_setting_table(t);
  CHECK(text.rfind("B\\A,|l>,|r>,|l>+|r>", 0) == 0);
  const SettingTable back = io::parse_setting_table(text);
  CHECK(back.p == t.p);

  // Typographic kets and spaces in labels are accepted.
  std::string fancy = text;
  for (std::size_t pos; (pos = fancy.find("|l>+|r>")) != std::string::npos;) {
    fancy.replace(pos, 7, "|l⟩ + |r⟩");
  }
  CHECK(io::parse_setting_table(fancy).p == t.p);

  std::string swapped = text;
  swapped.replace(swapped.find("|l>-|r>"), 7, "|l>-i|r>");
  CHECK_THROWS_AS(io::parse_setting_table(swapped), DataError);
  CHECK_THROWS_AS(io::parse_setting_table("B\\A\n"), DataError);
}

TEST_CASE("reports and trajectories") {
  io::Report r{"pauli", fixtures::pauli_state(), project_physical(fixtures::pauli_state()),
               "psi-slits", 0.961, 0.96, {0.1, 0.2}, {{"condition_number", 1.9}}};
  const nlohmann::json j = nlohmann::json::parse(io::format_report(r));
  CHECK(j.at("mode") == "pauli");
  CHECK(j.at("target") == "psi-slits");
  CHECK(j.at("fidelity_raw").get<double>() == 0.961);
  CHECK(j.at("condition_number").get<double>() == 1.9);
  CHECK(j.at("residuals").size() == 2);
  CHECK(io::parse_density(j.at("raw").dump()).matrix() == fixtures::pauli_state().matrix());

  const OpticalGeometry g = OpticalGeometry::reference_double_slit();
  const Trajectory t = bloch_trajectory(g, default_trajectory_samples(g, 50));
  const std::string csv = io::format_trajectory(t);
  CHECK(csv.rfind("x_m,bx,by,bz,azimuth_rad\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(t.points.size()) + 1);
}

TEST_CASE("fixtures by name") {
  CHECK(fixtures::find("table1a") != nullptr);
  CHECK(fixtures::find("fixtures/table1b.csv") == fixtures::find("table1b"));
  CHECK(fixtures::find("./fixtures/pauli-state.json") == fixtures::find("pauli-state"));
  CHECK(fixtures::find("table9") == nullptr);
  CHECK(fixtures::all().size() == 5);
  const auto* g = fixtures::find("geometry");
  REQUIRE(g != nullptr);
  CHECK(std::get<OpticalGeometry>(g->payload).slit_width == 40e-6);
}

TEST_CASE("geometry files") {
  TempDir dir;
  io::write_text(dir / "g.cfg", kReferenceConfig);
  const OpticalGeometry g = io::read_geometry(dir / "g.cfg");
  io::write_geometry(dir / "h.cfg", g);
  CHECK(io::read_geometry(dir / "h.cfg").slit_offsets == g.slit_offsets);
  CHECK_THROWS_AS(io::read_geometry(dir / "none.cfg"), IoError);
}
