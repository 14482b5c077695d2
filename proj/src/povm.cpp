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

#include "slitqubit/povm.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "slitqubit/errors.hpp"
#include "slitqubit/quadrature.hpp"

namespace slitqubit {

namespace {

constexpr double kPi = std::numbers::pi;

double focal_K(const OpticalGeometry& g) {
  return kPi * g.slit_width / (g.wavelength * g.focal_length);
}

// sqrt(K/pi): peak amplitude used as the scale for darkness checks.
double amplitude_scale(const OpticalGeometry& g) {
  if (g.at_focal_plane()) return std::sqrt(focal_K(g) / kPi);
  if (g.at_image_plane()) {
    const double m = (g.image_distance() - g.focal_length) / g.focal_length;
    return 1.0 / std::sqrt(g.slit_width * m);
  }
  return std::sqrt(derive_scales(g).K / kPi);
}

}  // namespace

PureState focal_plane_state(const OpticalGeometry& g, double x) {
  g.validate();
  const double K = focal_K(g);
  const double envelope = std::sqrt(K / kPi) * sinc(K * x);
  ComplexVector v(g.slit_count());
  for (int n = 0; n < g.slit_count(); ++n) {
    const double phase = -2.0 * kPi * g.slit_offsets[n] * x / (g.wavelength * g.focal_length);
    v(n) = std::polar(envelope, phase);
  }
  return PureState(std::move(v), Normalization::kUnnormalized);
}

PureState image_plane_state(const OpticalGeometry& g, double x) {
  g.validate();
  const double m = (g.image_distance() - g.focal_length) / g.focal_length;
  const double width = g.slit_width * m;
  const double height = 1.0 / std::sqrt(width);
  ComplexVector v(g.slit_count());
  for (int n = 0; n < g.slit_count(); ++n) {
    const double centre = -m * g.slit_offsets[n];
    v(n) = std::abs(x - centre) <= 0.5 * width ? height : 0.0;
  }
  return PureState(std::move(v), Normalization::kUnnormalized);
}

PureState measurement_state(const OpticalGeometry& g, double x, AmplitudeModel model) {
  if (g.at_focal_plane()) return focal_plane_state(g, x);
  if (g.at_image_plane()) return image_plane_state(g, x);
  ComplexVector v(g.slit_count());
  if (model == AmplitudeModel::kSinc) {
    const DerivedScales s = derive_scales(g);
    for (int n = 0; n < g.slit_count(); ++n) {
      v(n) = sinc_amplitude(s, g, g.slit_offsets[n], x);
    }
  } else {
    for (int n = 0; n < g.slit_count(); ++n) {
      v(n) = fresnel_amplitude(g, g.slit_offsets[n], x);
    }
  }
  return PureState(std::move(v), Normalization::kUnnormalized);
}

MeasurementEffect measurement_effect(const OpticalGeometry& g, double x, AmplitudeModel model) {
  PureState m = measurement_state(g, x, model);
  ComplexMatrix op = m.amplitudes() * m.amplitudes().adjoint();
  return MeasurementEffect{x, std::move(m), std::move(op)};
}

std::vector<double> uniform_grid(Interval window, double step) {
  if (!(step > 0.0) || !(window.hi > window.lo)) {
    throw InvalidArgument("uniform_grid: need step > 0 and a non-empty window");
  }
  const auto n = static_cast<long>(std::llround(window.width() / step));
  std::vector<double> xs;
  xs.reserve(n + 1);
  for (long i = 0; i <= n; ++i) xs.push_back(window.lo + static_cast<double>(i) * step);
  return xs;
}

double completeness_defect(const OpticalGeometry& g, Interval window, double step,
                           AmplitudeModel model) {
  const int n = g.slit_count();
  std::vector<CompensatedSum> re(n * n);
  std::vector<CompensatedSum> im(n * n);
  for (double x : uniform_grid(window, step)) {
    const ComplexVector m = measurement_state(g, x, model).amplitudes();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const cplx e = m(i) * std::conj(m(j)) * step;
        re[i * n + j].add(e.real());
        im[i * n + j].add(e.imag());
      }
    }
  }
  ComplexMatrix defect(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) defect(i, j) = cplx(re[i * n + j].value(), im[i * n + j].value());
  }
  defect -= ComplexMatrix::Identity(n, n);
  const DensityMatrix hermitian(defect, Normalization::kUnnormalized);
  return hermitian.eigenvalues().cwiseAbs().maxCoeff();
}

Interval lobe_window(const OpticalGeometry& g, double lobes) {
  const double half = lobes * lobe_width(g);
  return {-half, half};
}

Interval central_window(const OpticalGeometry& g) {
  if (g.at_focal_plane()) {
    const double half = kPi / focal_K(g);
    return {-half, half};
  }
  const DerivedScales s = derive_scales(g);
  const double half = (kPi + 0.5 * s.delta_phi) / s.K;
  return {-half, half};
}

Trajectory bloch_trajectory(const OpticalGeometry& g, std::span<const double> xs,
                            AmplitudeModel model) {
  if (g.slit_count() != 2) throw DimensionMismatch("bloch_trajectory: needs a double slit");
  const double dark = kDegenerateAmplitude * amplitude_scale(g);
  Trajectory out;
  for (double x : xs) {
    const PureState m = measurement_state(g, x, model);
    if (std::abs(m[0]) < dark && std::abs(m[1]) < dark) {
      out.dropped.push_back(x);
      continue;
    }
    out.points.push_back({x, bloch_of(m)});
  }
  if (out.points.empty()) throw DataError("bloch_trajectory: every sample is degenerate");
  return out;
}

std::vector<double> default_trajectory_samples(const OpticalGeometry& g, int count) {
  if (count < 2) throw InvalidArgument("default_trajectory_samples: need at least two samples");
  const Interval w = central_window(g);
  return uniform_grid(w, w.width() / (count - 1));
}

std::vector<double> unwrap_azimuth(std::span<const TrajectoryPoint> points) {
  std::vector<double> out;
  out.reserve(points.size());
  double offset = 0.0;
  double previous = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double raw = points[i].bloch.azimuth();
    if (i > 0) {
      // Sign flips of a sinc envelope show up as jumps of pi; folding
      // modulo pi also absorbs the ordinary 2 pi wrap.
      double step = raw + offset - previous;
      while (step > 0.5 * kPi) {
        offset -= kPi;
        step -= kPi;
      }
      while (step < -0.5 * kPi) {
        offset += kPi;
        step += kPi;
      }
    }
    previous = raw + offset;
    out.push_back(previous);
  }
  return out;
}

std::vector<double> closest_measurement_points(const OpticalGeometry& g,
                                               std::span<const BlochPoint> targets,
                                               Interval window, AmplitudeModel model) {
  constexpr int kGrid = 4001;
  const double h = window.width() / (kGrid - 1);
  const double dark = 1e-6 * amplitude_scale(g);

  auto overlap = [&](double x, const BlochPoint& t) {
    const PureState m = measurement_state(g, x, model);
    if (std::sqrt(m.squared_norm()) < dark) return -2.0;
    return bloch_of(m).dot(t);
  };

  std::vector<double> out;
  for (const BlochPoint& t : targets) {
    double best_x = window.lo;
    double best = -3.0;
    for (int i = 0; i < kGrid; ++i) {
      const double x = window.lo + i * h;
      const double v = overlap(x, t);
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    double lo = std::max(window.lo, best_x - h);
    double hi = std::min(window.hi, best_x + h);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - ratio * (hi - lo);
    double d = lo + ratio * (hi - lo);
    double fc = overlap(c, t);
    double fd = overlap(d, t);
    for (int it = 0; it < 80 && hi - lo > 1e-12 * h; ++it) {
      if (fc >= fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - ratio * (hi - lo);
        fc = overlap(c, t);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + ratio * (hi - lo);
        fd = overlap(d, t);
      }
    }
    const double refined = 0.5 * (lo + hi);
    out.push_back(overlap(refined, t) >= best ? refined : best_x);
  }
  return out;
}

std::vector<BlochPoint> octahedron_directions() {
  return {{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
}

}  // namespace slitqubit
