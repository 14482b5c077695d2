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

#include "slitqubit/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "slitqubit/errors.hpp"
#include "slitqubit/quadrature.hpp"

namespace slitqubit {

namespace {

constexpr double kPlaneTol = 1e-12;  // relative, for z == f and z == image plane
constexpr int kPanelOrder = 10;

using cplx = std::complex<double>;


template <typename F>
cplx gauss_panel(const F& f, double lo, double hi) {
  const auto& rule = gauss_legendre(kPanelOrder);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  cplx acc = 0.0;
  for (int i = 0; i < kPanelOrder; ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * acc;
}

// Bisects until a panel agrees with the sum of its halves to within
// tol * (panel length); the integrand has unit modulus so that is a
// tolerance relative to its L1 norm.
template <typename F>
bool adaptive_gauss(const F& f, double lo, double hi, cplx whole, double tol, int level,
                    int max_levels, cplx& out) {
  const double mid = 0.5 * (lo + hi);
  const cplx left = gauss_panel(f, lo, mid);
  const cplx right = gauss_panel(f, mid, hi);
  const cplx refined = left + right;
  if (std::abs(refined - whole) <= tol * (hi - lo)) {
    out += refined;
    return true;
  }
  if (level >= max_levels) {
    out += refined;
    return false;
  }
  const bool ok_left = adaptive_gauss(f, lo, mid, left, tol, level + 1, max_levels, out);
  const bool ok_right = adaptive_gauss(f, mid, hi, right, tol, level + 1, max_levels, out);
  return ok_left && ok_right;
}

}  // namespace

void OpticalGeometry::validate() const {
  if (!(wavelength > 0.0)) throw InvalidGeometry("wavelength must be positive");
  if (!(slit_width > 0.0)) throw InvalidGeometry("slit_width must be positive");
  if (!(focal_length > 0.0)) throw InvalidGeometry("focal_length must be positive");
  if (!(slit_to_lens > focal_length)) {
    throw InvalidGeometry("slit_to_lens must exceed focal_length for a real image");
  }
  if (slit_offsets.empty()) throw InvalidGeometry("at least one slit offset is required");
  for (std::size_t i = 1; i < slit_offsets.size(); ++i) {
    if (!(slit_offsets[i] > slit_offsets[i - 1])) {
      throw InvalidGeometry("slit offsets must be strictly increasing");
    }
  }
  const double zi = image_distance();
  if (lens_to_detector < focal_length * (1.0 - kPlaneTol) ||
      lens_to_detector > zi * (1.0 + kPlaneTol)) {
    throw InvalidGeometry("lens_to_detector must lie between the focal plane (" +
                          std::to_string(focal_length) + " m) and the image plane (" +
                          std::to_string(zi) + " m)");
  }
}

double OpticalGeometry::image_distance() const {
  return slit_to_lens * focal_length / (slit_to_lens - focal_length);
}

bool OpticalGeometry::at_focal_plane() const {
  return std::abs(lens_to_detector - focal_length) <= kPlaneTol * focal_length;
}

bool OpticalGeometry::at_image_plane() const {
  const double zi = image_distance();
  return std::abs(lens_to_detector - zi) <= kPlaneTol * zi;
}

OpticalGeometry OpticalGeometry::with_z(double z) const {
  OpticalGeometry g = *this;
  g.lens_to_detector = z;
  return g;
}

OpticalGeometry OpticalGeometry::with_L(double L) const {
  OpticalGeometry g = *this;
  g.slit_to_lens = L;
  return g;
}

OpticalGeometry OpticalGeometry::reference_double_slit() {
  return double_slit(810e-9, 40e-6, 150e-6, 50e-3, 100e-3, 90e-3);
}

OpticalGeometry OpticalGeometry::double_slit(double wavelength, double slit_width,
                                             double separation, double focal_length,
                                             double slit_to_lens, double z) {
  OpticalGeometry g;
  g.wavelength = wavelength;
  g.slit_width = slit_width;
  g.slit_offsets = {-0.5 * separation, 0.5 * separation};
  g.focal_length = focal_length;
  g.slit_to_lens = slit_to_lens;
  g.lens_to_detector = z;
  return g;
}

DerivedScales derive_scales(const OpticalGeometry& g) {
  g.validate();
  if (g.at_focal_plane()) {
    throw FocalPlaneSingularity("detector in the focal plane: effective length R is infinite");
  }
  if (g.at_image_plane()) {
    throw ImagePlaneSingularity("detector in the image plane: R = 0 and K is infinite");
  }
  const double f = g.focal_length;
  const double L = g.slit_to_lens;
  const double z = g.lens_to_detector;
  DerivedScales s;
  s.R = (L * f + z * f - L * z) / (z - f);
  s.magnification = (z - f) / f;
  s.K = std::numbers::pi * g.slit_width * f / (g.wavelength * s.R * (z - f));
  s.delta_phi = s.magnification * s.K * slit_separation(g);
  return s;
}

double detector_distance_for(double R, double focal_length, double slit_to_lens) {
  const double f = focal_length;
  const double L = slit_to_lens;
  return f * (L + R) / (R + L - f);
}

double slit_separation(const OpticalGeometry& g) {
  if (g.slit_offsets.size() < 2) return 0.0;
  return g.slit_offsets.back() - g.slit_offsets.front();
}

double lobe_width(const OpticalGeometry& g) {
  if (g.at_focal_plane()) {
    return g.wavelength * g.focal_length / g.slit_width;  // pi / K with K = pi a / (lambda f)
  }
  return std::numbers::pi / derive_scales(g).K;
}

double sinc(double u) {
  if (std::abs(u) < 1e-4) {
    const double u2 = u * u;
    return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
  }
  return std::sin(u) / u;
}

std::complex<double> fresnel_amplitude(const OpticalGeometry& g, double r_n, double x,
                                       const QuadratureOptions& opts) {
  const DerivedScales s = derive_scales(g);
  const double f = g.focal_length;
  const double z = g.lens_to_detector;
  const double L = g.slit_to_lens;
  const double a = g.slit_width;
  const double c = std::numbers::pi / (g.wavelength * s.R);
  const double q = f / (z - f);

  auto integrand = [&](double xp) {
    const double u = xp + r_n;
    return std::polar(1.0, -c * (u * u + 2.0 * q * x * u));
  };

  const double lo = -0.5 * a;
  const double hi = 0.5 * a;
  cplx integral = 0.0;
  const bool ok = adaptive_gauss(integrand, lo, hi, gauss_panel(integrand, lo, hi),
                                 opts.relative_tolerance, 0, opts.max_levels, integral);
  if (!ok) {
    throw QuadratureError("fresnel_amplitude: tolerance not met at x = " + std::to_string(x));
  }
  const double prefactor = std::sqrt(f / (g.wavelength * s.R * a * (z - f)));
  const cplx chirp = std::polar(1.0, -c * (L - f) / (z - f) * x * x);
  return prefactor * chirp * integral;
}

std::complex<double> sinc_amplitude(const DerivedScales& s, const OpticalGeometry& g, double r_n,
                                    double x) {
  const double K = s.K;
  const double phase = -(2.0 * r_n / g.slit_width) * K * x;
  return std::sqrt(K / std::numbers::pi) * std::polar(1.0, phase) *
         sinc(K * (x + s.magnification * r_n));
}

std::complex<double> sinc_amplitude(const OpticalGeometry& g, double r_n, double x) {
  return sinc_amplitude(derive_scales(g), g, r_n, x);
}

}  // namespace slitqubit
