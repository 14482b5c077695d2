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

#include "slitqubit/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "slitqubit/errors.hpp"
#include "slitqubit/quadrature.hpp"

namespace slitqubit {

namespace {

constexpr int kApertureOrder = 24;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

void check_dims(const DensityMatrix& rho, const OpticalGeometry& g) {
  if (rho.dim() != g.slit_count()) {
    throw DimensionMismatch("state dimension " + std::to_string(rho.dim()) +
                            " does not match slit count " + std::to_string(g.slit_count()));
  }
}

double expectation(const DensityMatrix& rho, const ComplexVector& m) {
  const double p = m.dot(rho.matrix() * m).real();
  return p < 0.0 ? 0.0 : p;
}

}  // namespace

void ScanRecord::validate() const {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].x > samples[i - 1].x)) throw DataError("scan: x must be strictly increasing");
  }
  if (kind == ScanKind::kCounts) {
    for (const auto& s : samples) {
      if (s.value < 0.0 || s.value != std::floor(s.value)) {
        throw DataError("scan: counts must be non-negative integers");
      }
    }
  } else {
    for (const auto& s : samples) {
      if (s.value < 0.0) throw DataError("scan: probability density must be non-negative");
    }
    if (trapezoid(xs(), values()) > 1.0 + 1e-6) {
      throw DataError("scan: probability density integrates above one");
    }
  }
}

std::vector<double> ScanRecord::xs() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.x);
  return out;
}

std::vector<double> ScanRecord::values() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.value);
  return out;
}

double ScanRecord::total() const {
  CompensatedSum acc;
  for (const auto& s : samples) acc.add(s.value);
  return acc.value();
}

std::vector<double> cell_widths(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  out[0] = xs[1] - xs[0];
  out[n - 1] = xs[n - 1] - xs[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = 0.5 * (xs[i + 1] - xs[i - 1]);
  return out;
}

double fringe_period(const OpticalGeometry& g) {
  const double d = slit_separation(g);
  if (!(d > 0.0)) throw InvalidGeometry("fringe_period: needs at least two slits");
  if (g.at_focal_plane()) return g.wavelength * g.focal_length / d;
  return lobe_width(g) * g.slit_width / d;
}

std::vector<double> scan_grid(const OpticalGeometry& g, double lobes) {
  double step = lobe_width(g) / 50.0;
  if (g.slit_count() > 1) step = std::min(step, fringe_period(g) / 20.0);
  return uniform_grid(lobe_window(g, lobes), step);
}

double detection_probability(const DensityMatrix& rho, const OpticalGeometry& g, double x,
                             AmplitudeModel model) {
  check_dims(rho, g);
  return expectation(rho, measurement_state(g, x, model).amplitudes());
}

double detection_probability(const DensityMatrix& rho, const OpticalGeometry& g, double x,
                             double detector_width, AmplitudeModel model) {
  if (detector_width < 0.0) throw InvalidArgument("detector width must be non-negative");
  if (detector_width == 0.0) return detection_probability(rho, g, x, model);
  check_dims(rho, g);
  const auto& rule = gauss_legendre(kApertureOrder);
  double acc = 0.0;
  for (int i = 0; i < kApertureOrder; ++i) {
    const double xi = x + 0.5 * detector_width * rule.nodes[i];
    acc += 0.5 * rule.weights[i] * expectation(rho, measurement_state(g, xi, model).amplitudes());
  }
  return acc;
}

double joint_probability(const DensityMatrix& rho_ab, const OpticalGeometry& g_a, double x_a,
                         const OpticalGeometry& g_b, double x_b, AmplitudeModel model) {
  if (rho_ab.dim() != 4 || g_a.slit_count() != 2 || g_b.slit_count() != 2) {
    throw DimensionMismatch("joint_probability: expects two double-slit qubits");
  }
  const ComplexVector ma = measurement_state(g_a, x_a, model).amplitudes();
  const ComplexVector mb = measurement_state(g_b, x_b, model).amplitudes();
  return expectation(rho_ab, tensor(ma, mb));
}

PureState prepared_state(const PureState& psi_ab, const OpticalGeometry& g_b, double x_b,
                         AmplitudeModel model) {
  if (psi_ab.dim() != 4 || g_b.slit_count() != 2) {
    throw DimensionMismatch("prepared_state: expects a two-qubit state and a double slit");
  }
  const ComplexVector mb = measurement_state(g_b, x_b, model).amplitudes();
  ComplexVector out(2);
  for (int i = 0; i < 2; ++i) {
    out(i) = std::conj(mb(0)) * psi_ab[2 * i] + std::conj(mb(1)) * psi_ab[2 * i + 1];
  }
  return PureState(std::move(out), Normalization::kUnnormalized);
}

std::vector<double> expected_counts(const DensityMatrix& rho, const OpticalGeometry& g,
                                    std::span<const double> grid, const SimulationOptions& opts) {
  if (grid.empty()) throw DataError("simulate_scan: empty grid");
  if (!(opts.shots > 0.0)) throw InvalidArgument("simulate_scan: shots must be positive");
  if (opts.accidental_rate < 0.0) throw InvalidArgument("simulate_scan: negative accidental rate");
  check_dims(rho, g);
  const std::vector<double> cells = cell_widths(grid);
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = detection_probability(rho, g, grid[i], opts.detector_width, opts.model);
    const double cell = grid.size() > 1 ? cells[i] : 1.0;
    out[i] = opts.shots * p * cell + opts.accidental_rate;
  }
  return out;
}

ScanRecord simulate_scan(const DensityMatrix& rho, const OpticalGeometry& g,
                         std::span<const double> grid, const SimulationOptions& opts) {
  const std::vector<double> mean = expected_counts(rho, g, grid, opts);
  ScanRecord rec;
  rec.geometry = g;
  rec.kind = ScanKind::kCounts;
  rec.total_shots = static_cast<std::uint64_t>(std::llround(opts.shots));
  rec.seed = opts.seed;
  rec.detector_width = opts.detector_width;
  rec.accidental_rate = opts.accidental_rate;
  rec.samples.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::mt19937_64 engine(stream_seed(opts.seed, i));
    double count = 0.0;
    if (mean[i] > 0.0) {
      std::poisson_distribution<long long> draw(mean[i]);
      count = static_cast<double>(draw(engine));
    }
    rec.samples.push_back({grid[i], count});
  }
  rec.validate();
  return rec;
}

ScanRecord to_probability_density(const ScanRecord& counts) {
  if (counts.kind != ScanKind::kCounts) return counts;
  const double total = counts.total();
  if (!(total > 0.0)) throw DataError("to_probability_density: scan has no counts");
  const std::vector<double> cells = cell_widths(counts.xs());
  ScanRecord out = counts;
  out.kind = ScanKind::kProbabilityDensity;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i].value = counts.samples[i].value / (total * cells[i]);
  }
  return out;
}

CountBlock normalize_block(const CountBlock& raw, double efficiency_ratio,
                           OffAxisSettings off_axis) {
  if (!(efficiency_ratio > 0.0)) throw InvalidArgument("normalize_block: ratio must be positive");
  CountBlock out{};
  double total = 0.0;
  for (int b = 0; b < 2; ++b) {
    for (int a = 0; a < 2; ++a) {
      if (raw[b][a] < 0.0) throw DataError("normalize_block: negative count");
      double v = raw[b][a];
      if (off_axis.arm_a && a == 1) v *= efficiency_ratio;
      if (off_axis.arm_b && b == 1) v *= efficiency_ratio;
      out[b][a] = v;
      total += v;
    }
  }
  if (!(total > 0.0)) throw DataError("normalize_block: all-zero block");
  for (auto& row : out) {
    for (auto& v : row) v /= total;
  }
  return out;
}

double envelope_efficiency_ratio(const OpticalGeometry& g, double x_on_axis, double x_off_axis) {
  const DensityMatrix flat = DensityMatrix::maximally_mixed(g.slit_count());
  const double on = detection_probability(flat, g, x_on_axis);
  const double off = detection_probability(flat, g, x_off_axis);
  if (!(off > 0.0)) throw DataError("envelope_efficiency_ratio: off-axis envelope vanishes");
  return on / off;
}

double consistent_efficiency_ratio(const CountBlock& raw, double target_plus_plus,
                                   double target_minus_minus) {
  if (!(raw[0][0] > 0.0 && raw[1][1] > 0.0 && target_plus_plus > 0.0 &&
        target_minus_minus > 0.0)) {
    throw DataError("consistent_efficiency_ratio: diagonal entries must be positive");
  }
  return std::sqrt((target_minus_minus / target_plus_plus) * (raw[0][0] / raw[1][1]));
}

}  // namespace slitqubit
