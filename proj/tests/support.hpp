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

// Seeded random generators for property tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "slitqubit/quantum.hpp"

namespace slitqubit::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  cplx complex_normal() { return {normal(), normal()}; }

  BlochPoint unit_vector() {
    // Marsaglia: uniform on the sphere.
    while (true) {
      const double u = uniform(-1.0, 1.0);
      const double v = uniform(-1.0, 1.0);
      const double s = u * u + v * v;
      if (s >= 1.0 || s == 0.0) continue;
      const double k = 2.0 * std::sqrt(1.0 - s);
      return {u * k, v * k, 1.0 - 2.0 * s};
    }
  }

  ComplexVector vector(int dim) {
    ComplexVector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = complex_normal();
    return v;
  }

  PureState pure(int dim) {
    ComplexVector v = vector(dim);
    v /= v.norm();
    return PureState(v);
  }

  ComplexMatrix hermitian(int dim) {
    ComplexMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) g(i, j) = complex_normal();
    }
    return 0.5 * (g + g.adjoint());
  }

  // Ginibre ensemble, full rank with probability one.
  DensityMatrix density(int dim) {
    ComplexMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) g(i, j) = complex_normal();
    }
    ComplexMatrix r = g * g.adjoint();
    r /= r.trace().real();
    return DensityMatrix(r);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace slitqubit::testing
