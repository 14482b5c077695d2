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

// Forward models: detection patterns, post-selected state preparation and
// synthetic coincidence scans.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slitqubit/optics.hpp"
#include "slitqubit/povm.hpp"
#include "slitqubit/quantum.hpp"

namespace slitqubit {

enum class ScanKind { kCounts, kProbabilityDensity };

struct ScanSample {
  double x = 0.0;
  double value = 0.0;
};

// One detector sweep. For simulated records `seed` reproduces the counts;
// `arm_b_x` is set for conditional scans taken with the partner detector
// fixed.
struct ScanRecord {
  OpticalGeometry geometry;
  std::vector<ScanSample> samples;
  ScanKind kind = ScanKind::kCounts;
  std::uint64_t total_shots = 0;
  std::uint64_t seed = 0;
  double detector_width = 0.0;
  double accidental_rate = 0.0;
  std::optional<double> arm_b_x;

  // Throws DataError: x not strictly increasing, negative or non-integer
  // counts, density integrating above one.
  void validate() const;

  std::vector<double> xs() const;
  std::vector<double> values() const;
  double total() const;
};

// Width of the cell owned by each sample (midpoints between neighbours,
// full spacing at the two ends).
std::vector<double> cell_widths(std::span<const double> xs);

// Uniform scan grid over +/- lobes lobe widths with a step fine enough for
// both the envelope (lobe / 50) and the fringes (fringe period / 20).
std::vector<double> scan_grid(const OpticalGeometry& g, double lobes);

// Fringe period pi a / (d K); lambda f / d in the focal plane.
double fringe_period(const OpticalGeometry& g);

// Tr[rho M(x)] in 1/m. Negative rounding residue is clipped to zero.
double detection_probability(const DensityMatrix& rho, const OpticalGeometry& g, double x,
                             AmplitudeModel model = AmplitudeModel::kSinc);

// Same, averaged over a top-hat detector aperture of the given width.
double detection_probability(const DensityMatrix& rho, const OpticalGeometry& g, double x,
                             double detector_width,
                             AmplitudeModel model = AmplitudeModel::kSinc);

// Tr[(M_A(xA) (x) M_B(xB)) rho_ab] in 1/m^2.
double joint_probability(const DensityMatrix& rho_ab, const OpticalGeometry& g_a, double x_a,
                         const OpticalGeometry& g_b, double x_b,
                         AmplitudeModel model = AmplitudeModel::kSinc);

// <m(x_b)|_B |psi_ab>: the non-normalized state left in arm A.
PureState prepared_state(const PureState& psi_ab, const OpticalGeometry& g_b, double x_b,
                         AmplitudeModel model = AmplitudeModel::kSinc);

struct SimulationOptions {
  double shots = 1e4;           // expected detections per unit trace over the whole line
  double detector_width = 0.0;  // top-hat aperture (m)
  double accidental_rate = 0.0; // flat mean background per sample
  std::uint64_t seed = 0;
  AmplitudeModel model = AmplitudeModel::kSinc;
};

// Expected counts shots * P_w(x_i) * cell_i + accidental_rate, each drawn
// from a Poisson law on a stream keyed by (seed, i). rho may be a
// non-normalized conditional state; totals then scale with its trace.
ScanRecord simulate_scan(const DensityMatrix& rho, const OpticalGeometry& g,
                         std::span<const double> grid, const SimulationOptions& opts);

// Expected (noise-free) counts of simulate_scan.
std::vector<double> expected_counts(const DensityMatrix& rho, const OpticalGeometry& g,
                                    std::span<const double> grid, const SimulationOptions& opts);

// Counts rescaled to a probability density: c_i / (sum c * cell_i).
ScanRecord to_probability_density(const ScanRecord& counts);

// 2x2 coincidence block of one setting pair, indexed [arm B setting][arm A
// setting] with the "+" eigenstate first. Entries whose setting sits off
// the optical axis in a flagged arm are multiplied by efficiency_ratio (once
// per flagged arm), then the block is divided by its total.
using CountBlock = std::array<std::array<double, 2>, 2>;

struct OffAxisSettings {
  bool arm_a = false;
  bool arm_b = false;
};

CountBlock normalize_block(const CountBlock& raw, double efficiency_ratio,
                           OffAxisSettings off_axis = {true, true});

// Ratio of the fringe-free envelopes sum_n |phi_n|^2 at an on-axis and an
// off-axis detector position: the factor that equalizes their efficiencies.
double envelope_efficiency_ratio(const OpticalGeometry& g, double x_on_axis, double x_off_axis);

// Per-arm ratio that makes the two diagonal entries of a normalized block
// reproduce the given target probabilities.
double consistent_efficiency_ratio(const CountBlock& raw, double target_plus_plus,
                                   double target_minus_minus);

}  // namespace slitqubit
