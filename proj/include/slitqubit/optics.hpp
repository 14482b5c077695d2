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

// One-dimensional propagation of slit wavefunctions through a lens.
//
// Lengths are SI metres throughout. The slit plane is a distance L in
// front of a lens of focal length f; the detector plane sits a distance z
// behind it. Between the focal plane (z = f) and the image plane
// (z = L f / (L - f)) the field equals free propagation over the effective
// length R = (L f + z f - L z) / (z - f), demagnified by (z - f) / f.

#include <complex>
#include <vector>

namespace slitqubit {

struct OpticalGeometry {
  double wavelength = 0.0;
  double slit_width = 0.0;
  std::vector<double> slit_offsets;  // signed from the optical axis, increasing
  double focal_length = 0.0;
  double slit_to_lens = 0.0;       // L
  double lens_to_detector = 0.0;   // z

  int slit_count() const { return static_cast<int>(slit_offsets.size()); }

  // Throws InvalidGeometry on non-positive lengths, unordered offsets or a
  // detector outside [f, image plane].
  void validate() const;

  double image_distance() const;
  bool at_focal_plane() const;
  bool at_image_plane() const;

  // Copy with a different detector distance / slit-to-lens distance.
  OpticalGeometry with_z(double z) const;
  OpticalGeometry with_L(double L) const;

  // 810 nm, 40 um slits 150 um apart, f = 50 mm, L = 2f, z = 1.8f.
  static OpticalGeometry reference_double_slit();
  static OpticalGeometry double_slit(double wavelength, double slit_width, double separation,
                                     double focal_length, double slit_to_lens, double z);
};

struct DerivedScales {
  double R = 0.0;              // effective propagation length (m)
  double K = 0.0;              // diffraction scale (1/m)
  double delta_phi = 0.0;      // envelope displacement (rad), two-slit separation d
  double magnification = 0.0;  // (z - f) / f
};

// Throws FocalPlaneSingularity at z == f and ImagePlaneSingularity at R == 0.
DerivedScales derive_scales(const OpticalGeometry& g);

// Inverse of the R(z) relation: the z that yields the given R.
double detector_distance_for(double R, double focal_length, double slit_to_lens);

// Distance between the outermost slits (d for a double slit).
double slit_separation(const OpticalGeometry& g);

// pi / K: spacing between sinc zeros in the detector plane.
double lobe_width(const OpticalGeometry& g);

double sinc(double u);

struct QuadratureOptions {
  double relative_tolerance = 1e-9;
  int max_levels = 12;
};

// Fresnel-Kirchhoff amplitude of the uniformly illuminated slit at offset
// r_n, evaluated at transverse position x in the detector plane. Units of
// 1/sqrt(m). Throws QuadratureError when the tolerance is not met.
std::complex<double> fresnel_amplitude(const OpticalGeometry& g, double r_n, double x,
                                       const QuadratureOptions& opts = {});

// Far-field closed form sqrt(K/pi) exp(-i (2 r_n / a) K x) sinc(K (x + M r_n)).
std::complex<double> sinc_amplitude(const OpticalGeometry& g, double r_n, double x);
std::complex<double> sinc_amplitude(const DerivedScales& s, const OpticalGeometry& g, double r_n,
                                    double x);

}  // namespace slitqubit
