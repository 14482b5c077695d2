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

// Command-line front end. Exit codes: 0 success, 1 numeric or validation
// failure, 2 usage or configuration error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slitqubit/errors.hpp"
#include "slitqubit/fixtures.hpp"
#include "slitqubit/forward.hpp"
#include "slitqubit/io.hpp"
#include "slitqubit/optics.hpp"
#include "slitqubit/povm.hpp"
#include "slitqubit/quantum.hpp"
#include "slitqubit/tomography.hpp"

namespace sq = slitqubit;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kNumericFailure = 1;
constexpr int kUsageError = 2;

struct GeometryArgs {
  std::string geometry;
  std::string z;
  std::string model = "sinc";
};

void add_geometry_flags(CLI::App* cmd, GeometryArgs& a) {
  cmd->add_option("--geometry", a.geometry, "geometry config file (default: built-in double slit)");
  cmd->add_option("--z", a.z, "lens-to-detector distance, e.g. 90mm or 1.8f");
  cmd->add_option("--model", a.model, "amplitude model")->check(CLI::IsMember({"sinc", "fresnel"}));
}

sq::AmplitudeModel model_of(const GeometryArgs& a) {
  return a.model == "fresnel" ? sq::AmplitudeModel::kFresnel : sq::AmplitudeModel::kSinc;
}

sq::OpticalGeometry resolve_geometry(const GeometryArgs& a) {
  sq::OpticalGeometry g = a.geometry.empty() ? sq::fixtures::geometry() : sq::io::read_geometry(a.geometry);
  if (!a.z.empty()) {
    g.lens_to_detector = sq::io::parse_length(a.z, g.focal_length);
    try {
      g.validate();
    } catch (const sq::InvalidGeometry& e) {
      throw sq::ConfigError(std::string("--z: ") + e.what());
    }
  }
  return g;
}

std::optional<sq::PureState> named_qubit(const std::string& name) {
  const double h = 1.0 / std::sqrt(2.0);
  const sq::cplx i(0.0, 1.0);
  sq::ComplexVector v(2);
  if (name == "l") {
    v << 1.0, 0.0;
  } else if (name == "r") {
    v << 0.0, 1.0;
  } else if (name == "+") {
    v << h, h;
  } else if (name == "-") {
    v << h, -h;
  } else if (name == "+i") {
    v << h, i * h;
  } else if (name == "-i") {
    v << h, -i * h;
  } else {
    return std::nullopt;
  }
  return sq::PureState(v);
}

// psi-slits, a single-qubit label (l, r, +, -, +i, -i), a density-matrix
// fixture or a density-matrix file.
sq::DensityMatrix resolve_state(const std::string& spec) {
  if (spec == "psi-slits") return sq::DensityMatrix::from_pure(sq::psi_slits());
  if (auto q = named_qubit(spec)) return sq::DensityMatrix::from_pure(*q);
  if (const auto* f = sq::fixtures::find(spec); f != nullptr && !fs::exists(spec)) {
    if (const auto* rho = std::get_if<sq::DensityMatrix>(&f->payload)) return *rho;
    throw sq::ConfigError("fixture '" + f->name + "' is not a density matrix");
  }
  if (!fs::exists(spec)) {
    throw sq::ConfigError("unknown state '" + spec +
                          "' (expected psi-slits, l, r, +, -, +i, -i, a fixture or a file)");
  }
  sq::DensityMatrix rho = sq::io::read_density(spec);
  if (!rho.is_physical()) throw sq::DataError("state file '" + spec + "' is not positive semidefinite");
  return rho;
}

sq::PureState resolve_target(const std::string& spec) {
  if (spec == "psi-slits") return sq::psi_slits();
  if (auto q = named_qubit(spec)) return *q;
  throw sq::ConfigError("unknown target '" + spec + "' (expected psi-slits, l, r, +, -, +i, -i)");
}

sq::SettingTable resolve_table(const std::string& spec, sq::fixtures::EfficiencyRatios ratios,
                               bool& was_counts) {
  sq::fixtures::CountTable values{};
  if (const auto* f = sq::fixtures::find(spec); f != nullptr && !fs::exists(spec)) {
    if (const auto* t = std::get_if<sq::SettingTable>(&f->payload)) {
      values = t->p;
    } else if (const auto* c = std::get_if<sq::fixtures::CountTable>(&f->payload)) {
      values = *c;
    } else {
      throw sq::ConfigError("fixture '" + f->name + "' is not a setting table");
    }
  } else {
    // Count tables share the layout; entries above one mark raw counts.
    values = sq::io::read_setting_table(spec).p;
  }
  was_counts = false;
  for (const auto& row : values) {
    for (double v : row) was_counts = was_counts || v > 1.0;
  }
  if (was_counts) return sq::fixtures::normalize_counts(values, ratios);
  sq::SettingTable t;
  t.p = values;
  return t;
}

sq::Interval default_window(const sq::OpticalGeometry& g) {
  if (g.at_image_plane()) {
    double reach = 0.0;
    for (double r : g.slit_offsets) reach = std::max(reach, std::abs(r));
    const double m = g.image_distance() / g.slit_to_lens;
    const double half = 1.5 * m * (reach + g.slit_width);
    return {-half, half};
  }
  return sq::lobe_window(g, 2.5);
}

double default_step(const sq::OpticalGeometry& g) {
  if (g.at_image_plane()) return g.slit_width / 50.0;
  double step = sq::lobe_width(g) / 50.0;
  if (g.slit_count() > 1) step = std::min(step, sq::fringe_period(g) / 20.0);
  return step;
}

std::vector<double> resolve_grid(const sq::OpticalGeometry& g, const std::string& window,
                                 const std::string& step) {
  sq::Interval w = default_window(g);
  if (!window.empty()) {
    const double half = sq::io::parse_length(window, g.focal_length);
    if (!(half > 0.0)) throw sq::ConfigError("--window must be positive");
    w = {-half, half};
  }
  const double h = step.empty() ? default_step(g) : sq::io::parse_length(step, g.focal_length);
  if (!(h > 0.0) || h > w.width()) throw sq::ConfigError("--step must be positive and below the window");
  return sq::uniform_grid(w, h);
}

void print_matrix(const char* title, const sq::DensityMatrix& rho) {
  std::printf("%s\n", title);
  for (int i = 0; i < rho.dim(); ++i) {
    for (int j = 0; j < rho.dim(); ++j) {
      const sq::cplx v = rho(i, j);
      std::printf("  %+.3f%+.3fi", v.real(), v.imag());
    }
    std::printf("\n");
  }
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  GeometryArgs geometry;
  std::string state = "psi-slits";
  std::string arm_b_x;
  std::uint64_t seed = 1;
  double shots = 1e4;
  std::string out;
  std::string window;
  std::string step;
  std::string detector_width = "20um";
  double accidental_rate = 0.0;
  bool density = false;
};

int run_simulate(const SimulateArgs& a) {
  const sq::OpticalGeometry g = resolve_geometry(a.geometry);
  const sq::AmplitudeModel model = model_of(a.geometry);
  const sq::DensityMatrix rho = resolve_state(a.state);
  const std::vector<double> grid = resolve_grid(g, a.window, a.step);
  if (!(a.shots > 0.0)) throw sq::ConfigError("--shots must be positive");

  sq::SimulationOptions opts;
  opts.detector_width = sq::io::parse_length(a.detector_width, g.focal_length);
  opts.accidental_rate = a.accidental_rate;
  opts.seed = a.seed;
  opts.model = model;

  std::optional<double> arm_b;
  sq::DensityMatrix scanned = rho;
  if (g.slit_count() == 2 && rho.dim() == 4) {
    if (a.arm_b_x.empty()) throw sq::ConfigError("two-qubit state needs --arm-b-x");
    arm_b = sq::io::parse_length(a.arm_b_x, g.focal_length);
    scanned = sq::condition(rho, sq::measurement_state(g, *arm_b, model), sq::Subsystem::kB);
    // --shots counts coincidences with the arm B detector on axis; other
    // positions scale with the arm B detection probability.
    const double on_axis =
        sq::condition(rho, sq::measurement_state(g, 0.0, model), sq::Subsystem::kB).trace();
    opts.shots = a.shots / on_axis;
  } else if (rho.dim() == g.slit_count()) {
    if (!a.arm_b_x.empty()) throw sq::ConfigError("--arm-b-x needs a two-qubit state");
    opts.shots = a.shots;
  } else {
    throw sq::ConfigError("state dimension " + std::to_string(rho.dim()) + " does not fit " +
                          std::to_string(g.slit_count()) + " slits");
  }

  sq::ScanRecord scan = sq::simulate_scan(scanned, g, grid, opts);
  scan.arm_b_x = arm_b;
  if (a.density) scan = sq::to_probability_density(scan);
  sq::io::write_scan(a.out, scan);
  std::printf("seed %llu\n", static_cast<unsigned long long>(a.seed));
  std::printf("wrote %zu samples to %s (metadata %s)\n", scan.samples.size(), a.out.c_str(),
              sq::io::sidecar_path(a.out).string().c_str());
  return kOk;
}

// ---------------------------------------------------------------------------

struct ReconstructArgs {
  std::string mode;
  std::string table;
  std::vector<std::string> scans;
  std::string out;
  std::string target = "psi-slits";
  double ratio_x = 1.0;
  double ratio_y = 1.0;
  bool recovered_ratios = false;
  bool fit_L = false;
  bool poisson = false;
  std::string model = "sinc";
};

sq::io::Report make_report(const std::string& mode, const sq::DensityMatrix& raw,
                           const sq::DensityMatrix& projected, const std::string& target) {
  sq::io::Report r{mode, raw, projected};
  const sq::PureState psi = resolve_target(target);
  if (psi.dim() == raw.dim()) {
    r.target = target;
    r.fidelity_raw = sq::fidelity(raw, psi);
    r.fidelity_projected = sq::fidelity(projected, psi);
  } else {
    r.target = "";
  }
  return r;
}

void finish_report(const sq::io::Report& r, const std::string& out) {
  print_matrix("raw:", r.raw);
  print_matrix("projected:", r.projected);
  if (!r.target.empty()) {
    std::printf("fidelity vs %s: raw %.4f projected %.4f\n", r.target.c_str(), r.fidelity_raw,
                r.fidelity_projected);
  }
  if (!out.empty()) sq::io::write_report(out, r);
}

int run_reconstruct(const ReconstructArgs& a) {
  if (a.mode == "pauli") {
    if (a.table.empty()) throw sq::ConfigError("reconstruct pauli needs --table");
    if (!a.scans.empty()) throw sq::ConfigError("reconstruct pauli takes a table, not scans");
    sq::fixtures::EfficiencyRatios ratios{a.ratio_x, a.ratio_y};
    if (a.recovered_ratios) ratios = sq::fixtures::recovered_efficiency_ratios();
    bool was_counts = false;
    const sq::SettingTable t = resolve_table(a.table, ratios, was_counts);
    const sq::PauliReconstruction rec = sq::pauli_reconstruct(t);
    sq::io::Report r = make_report("pauli", rec.raw, rec.projected, a.target);
    if (was_counts) {
      r.scalars.emplace_back("efficiency_ratio_x", ratios.x);
      r.scalars.emplace_back("efficiency_ratio_y", ratios.y);
    }
    finish_report(r, a.out);
    return kOk;
  }
  if (a.scans.empty()) throw sq::ConfigError("reconstruct " + a.mode + " needs scan files");
  if (!a.table.empty()) throw sq::ConfigError("--table only applies to reconstruct pauli");
  sq::FitOptions opts;
  opts.fit_L = a.fit_L;
  opts.weighting = a.poisson ? sq::FitWeighting::kPoisson : sq::FitWeighting::kUnweighted;
  opts.model = a.model == "fresnel" ? sq::AmplitudeModel::kFresnel : sq::AmplitudeModel::kSinc;

  if (a.mode == "pattern") {
    if (a.scans.size() != 1) throw sq::ConfigError("reconstruct pattern takes exactly one scan");
    const sq::ScanRecord scan = sq::io::read_scan(a.scans[0]);
    const sq::PatternInversion inv = sq::pattern_invert(scan, scan.geometry);
    sq::io::Report r = make_report("pattern", inv.raw, inv.projected, a.target);
    r.scalars = {{"beta", inv.beta}, {"delta", inv.delta}};
    finish_report(r, a.out);
    return kOk;
  }

  // scan
  std::vector<sq::ScanRecord> scans;
  for (const auto& path : a.scans) scans.push_back(sq::io::read_scan(path));
  if (scans.size() == 1 && !scans[0].arm_b_x) {
    const sq::ConditionalFit fit = sq::fit_conditional(scans[0], scans[0].geometry, opts);
    sq::io::Report r = make_report("scan", fit.rho, fit.rho, a.target);
    r.residuals = {fit.residual};
    r.scalars = {{"amplitude", fit.amplitude}, {"slit_to_lens_m", fit.slit_to_lens}};
    finish_report(r, a.out);
    return kOk;
  }
  const sq::OpticalGeometry& g = scans[0].geometry;
  const sq::ScanPipelineResult res = sq::reconstruct_from_scans(scans, g, g, opts);
  sq::io::Report r = make_report("scan", res.state.raw, res.state.projected, a.target);
  for (const auto& fit : res.fits) r.residuals.push_back(fit.residual);
  r.scalars = {{"frame_condition_number", res.frame.condition_number}};
  finish_report(r, a.out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct TrajectoryArgs {
  GeometryArgs geometry;
  std::string out;
  std::string window;
  std::string step;
};

int run_trajectory(const TrajectoryArgs& a) {
  const sq::OpticalGeometry g = resolve_geometry(a.geometry);
  std::vector<double> xs;
  if (a.window.empty() && a.step.empty() && !g.at_image_plane()) {
    xs = sq::default_trajectory_samples(g);
  } else {
    xs = resolve_grid(g, a.window, a.step);
  }
  const sq::Trajectory t = sq::bloch_trajectory(g, xs, model_of(a.geometry));
  const std::string csv = sq::io::format_trajectory(t);
  if (a.out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    sq::io::write_text(a.out, csv);
    std::printf("wrote %zu points to %s (%zu dark samples dropped)\n", t.points.size(),
                a.out.c_str(), t.dropped.size());
  }
  return kOk;
}

int run_fidelity(const std::string& state, const std::string& target) {
  const sq::DensityMatrix rho = resolve_state(state);
  const sq::PureState psi = resolve_target(target);
  if (psi.dim() != rho.dim()) {
    throw sq::ConfigError("target " + target + " has dimension " + std::to_string(psi.dim()) +
                          ", state has " + std::to_string(rho.dim()));
  }
  std::printf("fidelity %.6f\n", sq::fidelity(rho, psi));
  return kOk;
}

// ---------------------------------------------------------------------------

int run_validate() {
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    std::printf("%s  %s\n", ok ? "PASS" : "FAIL", what.c_str());
    if (!ok) ++failures;
  };
  char buf[256];

  const sq::PauliReconstruction rec = sq::pauli_reconstruct(sq::fixtures::pauli_probabilities());
  const double dev =
      (rec.raw.matrix() - sq::fixtures::pauli_state().matrix()).cwiseAbs().maxCoeff();
  std::snprintf(buf, sizeof buf, "six-setting table -> printed matrix, max deviation %.4f (<= 0.005)", dev);
  check(dev <= 0.005, buf);

  const double f_pauli = sq::fidelity(rec.raw, sq::psi_slits());
  std::snprintf(buf, sizeof buf, "six-setting fidelity %.3f (0.961 +/- 0.002)", f_pauli);
  check(std::abs(f_pauli - 0.961) <= 0.002, buf);

  const double f_scan = sq::fidelity(sq::fixtures::scan_state(), sq::psi_slits());
  std::snprintf(buf, sizeof buf, "conditional-scan fidelity %.3f (0.824 +/- 0.001)", f_scan);
  check(std::abs(f_scan - 0.824) <= 0.001, buf);

  const sq::fixtures::EfficiencyRatios ratios = sq::fixtures::recovered_efficiency_ratios();
  const sq::SettingTable normalized =
      sq::fixtures::normalize_counts(sq::fixtures::pauli_counts(), ratios);
  const sq::SettingTable printed = sq::fixtures::pauli_probabilities();
  double table_dev = 0.0;
  for (int b = 0; b < sq::kSettingCount; ++b) {
    for (int a = 0; a < sq::kSettingCount; ++a) {
      table_dev = std::max(table_dev, std::abs(normalized.p[b][a] - printed.p[b][a]));
    }
  }
  std::snprintf(buf, sizeof buf,
                "raw counts -> normalized table (ratios x %.4f, y %.4f), max deviation %.4f (<= 0.0006)",
                ratios.x, ratios.y, table_dev);
  check(table_dev <= 0.0006, buf);

  const sq::OpticalGeometry focal = sq::fixtures::geometry().with_z(sq::fixtures::geometry().focal_length);
  const double period = sq::fringe_period(focal);
  std::snprintf(buf, sizeof buf, "focal-plane fringe period %.1f um (270 um)", period * 1e6);
  check(std::abs(period - 270e-6) < 1e-6, buf);

  std::printf("%s\n", failures == 0 ? "all checks passed" : "validation FAILED");
  return failures == 0 ? kOk : kNumericFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slitqubit: spatial-qubit simulation and tomography"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "simulate a Poisson scan of a state");
  add_geometry_flags(simulate, sim.geometry);
  simulate->add_option("--state", sim.state, "psi-slits, l, r, +, -, +i, -i, fixture or file");
  simulate->add_option("--arm-b-x", sim.arm_b_x, "arm B detector position for conditional scans");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--shots", sim.shots,
                       "expected detections (two-qubit: coincidences with arm B on axis)");
  simulate->add_option("--out", sim.out, "output CSV")->required();
  simulate->add_option("--window", sim.window, "half width of the scan, e.g. 500um");
  simulate->add_option("--step", sim.step, "scan step, e.g. 5um");
  simulate->add_option("--detector-width", sim.detector_width, "detector slit width");
  simulate->add_option("--accidental-rate", sim.accidental_rate, "mean background counts per sample");
  simulate->add_flag("--density", sim.density, "write a probability density instead of counts");

  ReconstructArgs rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "reconstruct a density matrix");
  reconstruct->add_option("mode", rec.mode, "pauli | scan | pattern")
      ->required()
      ->check(CLI::IsMember({"pauli", "scan", "pattern"}));
  reconstruct->add_option("scans", rec.scans, "scan CSV files (scan, pattern)");
  reconstruct->add_option("--table", rec.table, "setting table file or fixture (pauli)");
  reconstruct->add_option("--out", rec.out, "report JSON");
  reconstruct->add_option("--target", rec.target, "fidelity target");
  reconstruct->add_option("--ratio-x", rec.ratio_x, "efficiency ratio for |l>-|r> (count tables)");
  reconstruct->add_option("--ratio-y", rec.ratio_y, "efficiency ratio for |l>-i|r> (count tables)");
  reconstruct->add_flag("--recovered-ratios", rec.recovered_ratios,
                        "use the ratios recovered from the built-in count table");
  reconstruct->add_flag("--fit-L", rec.fit_L, "also fit the slit-to-lens distance");
  reconstruct->add_flag("--poisson", rec.poisson, "Poisson-weighted least squares");
  reconstruct->add_option("--model", rec.model, "amplitude model")
      ->check(CLI::IsMember({"sinc", "fresnel"}));

  TrajectoryArgs traj;
  auto* trajectory = app.add_subcommand("trajectory", "Bloch trajectory of the detector scan");
  add_geometry_flags(trajectory, traj.geometry);
  trajectory->add_option("--out", traj.out, "output CSV (default stdout)");
  trajectory->add_option("--window", traj.window, "half width, e.g. 300um");
  trajectory->add_option("--step", traj.step, "sample step");

  std::string fid_state;
  std::string fid_target = "psi-slits";
  auto* fid = app.add_subcommand("fidelity", "fidelity of a state with a pure target");
  fid->add_option("--state", fid_state, "fixture or density-matrix file")->required();
  fid->add_option("--target", fid_target, "psi-slits, l, r, +, -, +i, -i");

  auto* validate = app.add_subcommand("validate", "check the built-in reference data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsageError;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*reconstruct) return run_reconstruct(rec);
    if (*trajectory) return run_trajectory(traj);
    if (*fid) return run_fidelity(fid_state, fid_target);
    if (*validate) return run_validate();
  } catch (const sq::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const sq::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const sq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericFailure;
  }
  return kUsageError;
}
