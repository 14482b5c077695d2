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

// Position-indexed POVM of a detector scanning the plane behind the lens.
// A click at x projects the slit qudit onto the non-normalized state
// |m(x)> = sum_n phi_n(x) |n>, with effect M(x) = |m(x)><m(x)|.

#include <span>
#include <vector>

#include "slitqubit/optics.hpp"
#include "slitqubit/quantum.hpp"

namespace slitqubit {

enum class AmplitudeModel { kSinc, kFresnel };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

struct MeasurementEffect {
  double x = 0.0;
  PureState state;
  ComplexMatrix op;  // units 1/m
};

// Projection state for a detector at x, components m_n = phi_n(x) so that
// Tr[rho M] = sum_kl rho_kl conj(phi_k) phi_l. Focal- and image-plane
// geometries are routed to their dedicated limits; everything in between
// uses the selected amplitude model.
PureState measurement_state(const OpticalGeometry& g, double x,
                            AmplitudeModel model = AmplitudeModel::kSinc);

MeasurementEffect measurement_effect(const OpticalGeometry& g, double x,
                                     AmplitudeModel model = AmplitudeModel::kSinc);

// Fraunhofer limit z = f: all envelopes coincide (K = pi a / (lambda f)) and
// slit n carries the relative phase exp(-i 2 pi r_n x / (lambda f)).
PureState focal_plane_state(const OpticalGeometry& g, double x);

// Geometric-optics limit at the image plane: top-hat slit images of width
// a M centred on -M r_n.
PureState image_plane_state(const OpticalGeometry& g, double x);

// x_i = window.lo + i * step, i = 0..n with n = round(width / step).
std::vector<double> uniform_grid(Interval window, double step);

// Spectral norm of sum_i M(x_i) step - I over the uniform grid.
double completeness_defect(const OpticalGeometry& g, Interval window, double step,
                           AmplitudeModel model = AmplitudeModel::kSinc);

// Window of +/- lobes sinc lobes (pi / K each) around the optical axis.
Interval lobe_window(const OpticalGeometry& g, double lobes);

// Both main lobes: |K x| <= pi + delta_phi / 2 (|K x| <= pi at z = f).
Interval central_window(const OpticalGeometry& g);

struct TrajectoryPoint {
  double x = 0.0;
  BlochPoint bloch;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::vector<double> dropped;  // samples where every amplitude vanished
};

// Threshold, relative to sqrt(K/pi), below which a sample counts as dark.
inline constexpr double kDegenerateAmplitude = 1e-12;

// Requires a double slit. Throws DataError when every sample is dark.
Trajectory bloch_trajectory(const OpticalGeometry& g, std::span<const double> xs,
                            AmplitudeModel model = AmplitudeModel::kSinc);

// 400 uniform samples over central_window(g).
std::vector<double> default_trajectory_samples(const OpticalGeometry& g, int count = 400);

// Azimuths with jumps of +/- pi removed (sinc sign flips), starting from the
// first sample's principal value.
std::vector<double> unwrap_azimuth(std::span<const TrajectoryPoint> points);

// For each target direction, the x in the window whose projection state's
// Bloch vector has the largest overlap with it (grid search then golden
// section refinement).
std::vector<double> closest_measurement_points(const OpticalGeometry& g,
                                               std::span<const BlochPoint> targets,
                                               Interval window,
                                               AmplitudeModel model = AmplitudeModel::kSinc);

// Bloch directions of a regular octahedron: +z, -z, +x, -x, +y, -y.
std::vector<BlochPoint> octahedron_directions();

}  // namespace slitqubit
