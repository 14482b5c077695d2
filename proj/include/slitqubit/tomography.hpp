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

// Three routes from measured patterns back to density matrices:
//   * linear inversion of six-setting Pauli correlation tables,
//   * projection of a single intermediate-plane scan onto the patterns of
//     rho_ll - rho_rr and rho_lr,
//   * least-squares fits of conditional scans, stitched into a two-qubit
//     state through the dual frame of the partner arm's detector positions.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "slitqubit/forward.hpp"
#include "slitqubit/optics.hpp"
#include "slitqubit/povm.hpp"
#include "slitqubit/quantum.hpp"

namespace slitqubit {

// Order of settings in rows/columns: |l>, |r>, |l>+|r>, |l>-|r>, |l>+i|r>,
// |l>-i|r>. Pairs (0,1), (2,3), (4,5) are the sigma_z, sigma_x, sigma_y
// eigenstates.
inline constexpr int kSettingCount = 6;
extern const std::array<std::string, kSettingCount> kSettingLabels;

// Rows are the fixed arm B setting, columns the scanning arm A setting.
struct SettingTable {
  std::array<std::array<double, kSettingCount>, kSettingCount> p{};

  // Entries in [0, 1] and every 2x2 conjugate-setting block summing to one
  // within block_tolerance. Throws DataError otherwise.
  void validate(double block_tolerance = 0.02) const;

  // Exact probability table of a two-qubit state.
  static SettingTable from_state(const DensityMatrix& rho_ab);
};

struct PauliReconstruction {
  // <sigma_i (x) sigma_j>, i (arm A) and j (arm B) over {I, x, y, z}.
  Eigen::Matrix4d correlations;
  DensityMatrix raw;
  DensityMatrix projected;
};

PauliReconstruction pauli_reconstruct(const SettingTable& t);

struct PatternInversion {
  double beta = 0.0;
  double delta = 0.0;       // rho_ll - rho_rr
  cplx coherence = 0.0;     // rho_lr
  DensityMatrix raw;
  DensityMatrix projected;
};

// (3 / (2 dphi^2)) (1 - sinc(2 dphi)).
double overlap_beta(double delta_phi);

// Counts are converted to a density first. Refuses the focal plane and any
// geometry with |1 - beta| < 0.05.
PatternInversion pattern_invert(const ScanRecord& scan, const OpticalGeometry& g);

enum class FitWeighting { kUnweighted, kPoisson };

struct FitOptions {
  bool fit_L = false;
  FitWeighting weighting = FitWeighting::kUnweighted;
  AmplitudeModel model = AmplitudeModel::kSinc;
  int max_function_evaluations = 4000;
};

struct ConditionalFit {
  DensityMatrix rho;
  double amplitude = 0.0;   // counts per unit probability density
  double slit_to_lens = 0.0;
  double residual = 0.0;    // sum of (weighted) squared residuals
  int start_index = 0;
};

// Least-squares fit of counts ~ amplitude * P_w(x | rho, g) over physical
// rho = T^dag T / Tr, T lower triangular. Nine fixed starting points; the
// lowest residual wins, ties going to the earlier start.
ConditionalFit fit_conditional(const ScanRecord& scan, const OpticalGeometry& g,
                               const FitOptions& opts = {});

// Closed-form optimal amplitude for a fixed state.
double best_amplitude(const ScanRecord& scan, const OpticalGeometry& g, const DensityMatrix& rho,
                      const FitOptions& opts = {});

double fit_residual(const ScanRecord& scan, const OpticalGeometry& g, const DensityMatrix& rho,
                    double amplitude, const FitOptions& opts = {});

struct DualFrame {
  std::vector<double> points;
  std::vector<MeasurementEffect> effects;
  std::vector<Eigen::Matrix2cd> lambdas;
  // Of T with every row scaled to unit trace.
  double condition_number = 0.0;
};

// Lambda_i = sum_j pinv(T)_ji sigma_j with T_ij = Tr[M(x_i) sigma_j], so that
// sum_i Tr[M_i rho] Lambda_i = rho. Throws RankDeficient when the effects do
// not span the qubit operator space.
DualFrame build_dual_frame(const OpticalGeometry& g, std::span<const double> points,
                           AmplitudeModel model = AmplitudeModel::kSinc);

struct TwoQubitReconstruction {
  DensityMatrix raw;
  DensityMatrix projected;
};

// rho_AB = sum_i rho_A(x_i) (x) Lambda_i, rescaled to unit trace.
TwoQubitReconstruction reconstruct_two_qubit(std::span<const DensityMatrix> conditionals,
                                             const DualFrame& frame);

// Background-subtracted totals over the grand total.
std::vector<double> conditional_weights(std::span<const ScanRecord> scans);

struct ScanPipelineResult {
  std::vector<ConditionalFit> fits;
  std::vector<double> weights;
  DualFrame frame;
  TwoQubitReconstruction state;
};

// Fits every conditional scan (arm_b_x must be set), weights them by their
// totals and assembles the two-qubit state with the arm-B dual frame.
ScanPipelineResult reconstruct_from_scans(std::span<const ScanRecord> scans,
                                          const OpticalGeometry& g_a,
                                          const OpticalGeometry& g_b,
                                          const FitOptions& opts = {});

}  // namespace slitqubit
