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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "slitqubit/errors.hpp"
#include "slitqubit/fixtures.hpp"
#include "slitqubit/tomography.hpp"
#include "support.hpp"

using namespace slitqubit;
using slitqubit::testing::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

OpticalGeometry reference() { return OpticalGeometry::reference_double_slit(); }

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Noise-free density scan of rho over the grid.
ScanRecord density_scan(const DensityMatrix& rho, const OpticalGeometry& g,
                        const std::vector<double>& xs) {
  ScanRecord s;
  s.geometry = g;
  s.kind = ScanKind::kProbabilityDensity;
  for (double x : xs) s.samples.push_back({x, detection_probability(rho, g, x)});
  return s;
}

ScanRecord count_scan(const DensityMatrix& rho, const OpticalGeometry& g, std::uint64_t seed,
                      double shots = 1e4) {
  SimulationOptions o;
  o.seed = seed;
  o.shots = shots;
  o.detector_width = 20e-6;
  return simulate_scan(rho, g, scan_grid(g, 2.5), o);
}

std::vector<double> octahedral_points(const OpticalGeometry& g) {
  const std::vector<BlochPoint> dirs = octahedron_directions();
  return closest_measurement_points(g, dirs, central_window(g));
}

}  // namespace

TEST_CASE("exact setting tables invert to the state") {
  Gen gen(1);
  for (int t = 0; t < 200; ++t) {
    const DensityMatrix rho = gen.density(4);
    const SettingTable tab = SettingTable::from_state(rho);
    tab.validate(1e-12);
    const PauliReconstruction r = pauli_reconstruct(tab);
    CHECK(max_abs(r.raw.matrix() - rho.matrix()) < 1e-12);
    CHECK(r.raw.trace() == doctest::Approx(1.0).epsilon(1e-12));
  }
  const PureState psi = psi_slits();
  const PauliReconstruction r = pauli_reconstruct(SettingTable::from_state(DensityMatrix::from_pure(psi)));
  CHECK(r.correlations(1, 1) == doctest::Approx(1.0));
  CHECK(r.correlations(2, 2) == doctest::Approx(1.0));
  CHECK(r.correlations(3, 3) == doctest::Approx(-1.0));
  CHECK(fidelity(r.raw, psi) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("published table reproduces the published state") {
  const PauliReconstruction r = pauli_reconstruct(fixtures::pauli_probabilities());
  CHECK(max_abs(r.raw.matrix() - fixtures::pauli_state().matrix()) < 0.005);
  CHECK(fidelity(r.raw, psi_slits()) == doctest::Approx(0.961).epsilon(0.002).scale(1.0));
  CHECK(r.projected.is_physical());
  CHECK(fidelity(fixtures::scan_state(), psi_slits()) ==
        doctest::Approx(0.824).epsilon(0.002).scale(1.0));

  const SettingTable from_counts =
      fixtures::normalize_counts(fixtures::pauli_counts(), fixtures::recovered_efficiency_ratios());
  const PauliReconstruction rc = pauli_reconstruct(from_counts);
  CHECK(max_abs(rc.raw.matrix() - fixtures::pauli_state().matrix()) < 0.006);
}

TEST_CASE("setting table validation") {
  SettingTable t = fixtures::pauli_probabilities();
  CHECK_NOTHROW(t.validate());
  t.p[0][0] = 0.2;
  CHECK_THROWS_AS(t.validate(), DataError);
  t.p[0][0] = -0.1;
  CHECK_THROWS_AS(t.validate(), DataError);
  CHECK(kSettingLabels[3] == "|l>-|r>");
}

TEST_CASE("overlap beta") {
  const double dphi = derive_scales(reference()).delta_phi;
  CHECK(dphi == doctest::Approx(1.861684535460617).epsilon(1e-13));
  const double oracle = 3.0 / (2.0 * dphi * dphi) * (1.0 - std::sin(2.0 * dphi) / (2.0 * dphi));
  CHECK(overlap_beta(dphi) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(overlap_beta(dphi) == doctest::Approx(0.4966649215596067).epsilon(1e-13));
  CHECK(overlap_beta(1e-6) == doctest::Approx(1.0).epsilon(1e-12));
  // Series and closed form meet smoothly at the switch-over.
  CHECK(overlap_beta(0.0099999) == doctest::Approx(overlap_beta(0.0100001)).epsilon(1e-9));
  const double u = 0.0100001;
  CHECK(overlap_beta(u) == doctest::Approx(1.0 - u * u / 5.0).epsilon(1e-9));
}

TEST_CASE("single-scan inversion, reference geometry") {
  const OpticalGeometry g = reference();
  const std::vector<double> xs = scan_grid(g, 20.0);
  Gen gen(2);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const DensityMatrix rho = DensityMatrix::from_pure(gen.pure(2));
    const PatternInversion inv = pattern_invert(density_scan(rho, g, xs), g);
    worst = std::max(worst, max_abs(inv.raw.matrix() - rho.matrix()));
    CHECK(inv.projected.is_physical());
  }
  CHECK(worst < 0.05);
}

TEST_CASE("single-scan inversion, widely separated slits") {
  const OpticalGeometry g =
      OpticalGeometry::double_slit(810e-9, 40e-6, 50 * 40e-6, 50e-3, 100e-3, 90e-3);
  const std::vector<double> xs = scan_grid(g, 20.0);
  Gen gen(3);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const DensityMatrix rho = DensityMatrix::from_pure(gen.pure(2));
    const PatternInversion inv = pattern_invert(density_scan(rho, g, xs), g);
    worst = std::max(worst, max_abs(inv.raw.matrix() - rho.matrix()));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("single-scan inversion accepts counts") {
  const OpticalGeometry g = reference();
  SimulationOptions o;
  o.shots = 1e9;
  o.seed = 9;
  const DensityMatrix plus = density_from_bloch({1.0, 0.0, 0.0});
  const PatternInversion inv = pattern_invert(simulate_scan(plus, g, scan_grid(g, 20.0), o), g);
  CHECK(fidelity(inv.projected, state_from_bloch({1.0, 0.0, 0.0})) > 0.99);
}

TEST_CASE("single-scan inversion refuses singular geometries") {
  const OpticalGeometry g = reference();
  const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
  const OpticalGeometry focal = g.with_z(g.focal_length);
  std::vector<double> xs;
  for (int i = -2000; i <= 2000; ++i) xs.push_back(i * 1e-6);
  CHECK_THROWS_AS(pattern_invert(density_scan(rho, focal, xs), focal), InvalidGeometry);

  const OpticalGeometry near = g.with_z(1.01 * g.focal_length);
  CHECK(std::abs(1.0 - overlap_beta(derive_scales(near).delta_phi)) < 0.05);
  try {
    pattern_invert(density_scan(rho, near, scan_grid(near, 5.0)), near);
    FAIL("expected a refusal");
  } catch (const InvalidGeometry& e) {
    CHECK(std::string(e.what()).find("fit_conditional") != std::string::npos);
  }

  CHECK_THROWS_AS(pattern_invert(density_scan(rho, g, scan_grid(g, 1.5)), g), DataError);
}

TEST_CASE("conditional fit recovers pure states") {
  const OpticalGeometry g = reference();
  Gen gen(4);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const PureState psi = gen.pure(2);
    const ConditionalFit fit = fit_conditional(count_scan(DensityMatrix::from_pure(psi), g, seed), g);
    CHECK(fit.rho.is_physical());
    if (fidelity(fit.rho, psi) > 0.98) ++good;
  }
  CHECK(good >= 95);
}

TEST_CASE("conditional fit beats the true state") {
  const OpticalGeometry g = reference();
  Gen gen(5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DensityMatrix truth = gen.density(2);
    const ScanRecord scan = count_scan(truth, g, 100 + seed);
    const ConditionalFit fit = fit_conditional(scan, g);
    const double amp = best_amplitude(scan, g, truth);
    CHECK(fit.residual <= fit_residual(scan, g, truth, amp) * (1.0 + 1e-9));
    CHECK(fit.residual == doctest::Approx(fit_residual(scan, g, fit.rho, fit.amplitude)).epsilon(1e-6));
    CHECK(fit.amplitude > 0.0);
    CHECK(fit.slit_to_lens == doctest::Approx(g.slit_to_lens));
  }
}

TEST_CASE("conditional fit with Poisson weights and a free L") {
  const OpticalGeometry g = reference();
  const PureState psi = state_from_bloch({0.3, -0.8, 0.52});
  const ScanRecord scan = count_scan(DensityMatrix::from_pure(psi), g, 77, 1e5);
  FitOptions o;
  o.weighting = FitWeighting::kPoisson;
  CHECK(fidelity(fit_conditional(scan, g, o).rho, psi) > 0.99);
  o.fit_L = true;
  const ConditionalFit f = fit_conditional(scan, g.with_L(1.02 * g.slit_to_lens), o);
  CHECK(f.slit_to_lens == doctest::Approx(g.slit_to_lens).epsilon(0.01));
  CHECK(fidelity(f.rho, psi) > 0.98);
}

TEST_CASE("conditional fit rejects unusable scans") {
  const OpticalGeometry g = reference();
  ScanRecord flat = count_scan(DensityMatrix::maximally_mixed(2), g, 1);
  for (auto& s : flat.samples) s.value = 12.0;
  CHECK_THROWS_AS(fit_conditional(flat, g), DataError);
  ScanRecord few = count_scan(DensityMatrix::maximally_mixed(2), g, 1);
  few.samples.resize(20);
  CHECK_THROWS_AS(fit_conditional(few, g), DataError);
  ScanRecord dens = to_probability_density(count_scan(DensityMatrix::maximally_mixed(2), g, 1));
  CHECK_THROWS_AS(fit_conditional(dens, g), InvalidArgument);
}

TEST_CASE("dual frame of the octahedral points") {
  const OpticalGeometry g = reference();
  const std::vector<double> pts = octahedral_points(g);
  REQUIRE(pts.size() == 6);
  const DualFrame f = build_dual_frame(g, pts);
  CHECK(f.condition_number < 10.0);
  CHECK(f.lambdas.size() == 6);

  Gen gen(6);
  for (int t = 0; t < 100; ++t) {
    const DensityMatrix rho = gen.density(2);
    Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      acc += (rho.matrix() * f.effects[i].op).trace() * f.lambdas[i];
    }
    CHECK(max_abs(acc - rho.matrix()) < 1e-9);
  }

  const std::vector<double> three(pts.begin(), pts.begin() + 3);
  CHECK_THROWS_AS(build_dual_frame(g, three), RankDeficient);
  // Four positions in the focal plane all lie on the equator.
  const OpticalGeometry focal = g.with_z(g.focal_length);
  CHECK_THROWS_AS(build_dual_frame(focal, std::vector<double>{-100e-6, -30e-6, 20e-6, 70e-6}),
                  RankDeficient);
}

TEST_CASE("two-qubit assembly is independent of the point set") {
  const OpticalGeometry g = reference();
  const Interval w = central_window(g);
  Gen gen(7);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = gen.density(4);
    const int n = gen.integer(4, 9);
    std::vector<double> pts;
    for (int i = 0; i < n; ++i) pts.push_back(gen.uniform(0.9 * w.lo, 0.9 * w.hi));
    std::sort(pts.begin(), pts.end());
    const DualFrame f = build_dual_frame(g, pts);
    std::vector<DensityMatrix> cond;
    for (const auto& e : f.effects) cond.push_back(condition(rho, e.state, Subsystem::kB));
    const TwoQubitReconstruction r = reconstruct_two_qubit(cond, f);
    CHECK(max_abs(r.raw.matrix() - rho.matrix()) < 1e-9);
    CHECK(max_abs(r.raw.matrix() - r.raw.matrix().adjoint()) < 1e-12);
    CHECK(r.projected.is_physical());
    cond.pop_back();
    CHECK_THROWS_AS(reconstruct_two_qubit(cond, f), DimensionMismatch);
  }
}

TEST_CASE("conditional weights subtract the background") {
  const OpticalGeometry g = reference();
  ScanRecord a;
  a.geometry = g;
  a.samples = {{0.0, 12.0}, {1e-6, 14.0}};
  a.accidental_rate = 2.0;
  ScanRecord b = a;
  b.samples = {{0.0, 32.0}, {1e-6, 34.0}};
  const std::vector<ScanRecord> scans = {a, b};
  const std::vector<double> w = conditional_weights(scans);
  CHECK(w[0] == doctest::Approx(22.0 / 84.0));
  CHECK(w[1] == doctest::Approx(62.0 / 84.0));
}

TEST_CASE("scan pipeline end to end") {
  const OpticalGeometry g = reference();
  const DensityMatrix psi = DensityMatrix::from_pure(psi_slits());
  const std::vector<double> pts = octahedral_points(g);
  const std::vector<double> grid = scan_grid(g, 2.5);
  double mean_trace = 0.0;
  for (double x : pts) mean_trace += condition(psi, measurement_state(g, x), Subsystem::kB).trace();
  mean_trace /= static_cast<double>(pts.size());
  std::vector<ScanRecord> scans;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    SimulationOptions o;
    o.shots = 1e5 / mean_trace;
    o.seed = 500 + i;
    o.detector_width = 20e-6;
    ScanRecord s = simulate_scan(condition(psi, measurement_state(g, pts[i]), Subsystem::kB), g,
                                 grid, o);
    s.arm_b_x = pts[i];
    scans.push_back(s);
  }
  const ScanPipelineResult r = reconstruct_from_scans(scans, g, g);
  CHECK(r.fits.size() == 6);
  CHECK(r.state.raw.trace() == doctest::Approx(1.0));
  CHECK(fidelity(r.state.projected, psi_slits()) > 0.97);

  scans[0].arm_b_x.reset();
  CHECK_THROWS_AS(reconstruct_from_scans(scans, g, g), DataError);
}
