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

// Complex-matrix primitives for slit qubits/qudits.
//
// Basis ordering is fixed throughout the library: {|l>, |r>} for one slit
// qubit and {|ll>, |lr>, |rl>, |rr>} (arm A first) for a pair.

#include <Eigen/Dense>

#include <complex>
#include <string_view>

namespace slitqubit {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPhysicalTol = 1e-9;

enum class Normalization { kNormalized, kUnnormalized };

// Amplitude vector. Non-normalized states are legitimate here: projection
// states of a position measurement carry units of 1/sqrt(m).
class PureState {
 public:
  explicit PureState(ComplexVector amplitudes,
                     Normalization norm = Normalization::kNormalized);

  static PureState basis(int dim, int index);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  cplx operator[](int i) const { return amplitudes_(i); }
  double squared_norm() const { return amplitudes_.squaredNorm(); }
  bool is_normalized() const { return norm_ == Normalization::kNormalized; }

  // Throws DataError on a zero vector.
  PureState normalized() const;
  PureState scaled(cplx factor) const;

 private:
  ComplexVector amplitudes_;
  Normalization norm_;
};

// Hermitian matrix with an optional trace-one contract. Construction checks
// Hermiticity (relative to the largest entry) and then symmetrizes exactly.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m,
                         Normalization norm = Normalization::kNormalized);

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }
  bool is_normalized() const { return norm_ == Normalization::kNormalized; }

  Eigen::VectorXd eigenvalues() const;
  bool is_physical(double tol = kPhysicalTol) const;

  // Divides by the trace; throws DataError when the trace is not positive.
  DensityMatrix normalized() const;

 private:
  ComplexMatrix m_;
  Normalization norm_;
};

struct BlochPoint {
  double bx = 0.0;
  double by = 0.0;
  double bz = 0.0;

  double norm() const;
  double dot(const BlochPoint& o) const { return bx * o.bx + by * o.by + bz * o.bz; }
  // atan2(by, bx) in (-pi, pi].
  double azimuth() const;
};

enum class PauliAxis { kIdentity, kX, kY, kZ };

// Throws InvalidArgument for tokens other than i/x/y/z (case-insensitive).
PauliAxis parse_pauli_axis(std::string_view token);

Eigen::Matrix2cd pauli(PauliAxis axis);

// Kronecker product; the left factor indexes the slower (arm A) digit.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor(const ComplexVector& a, const ComplexVector& b);

// (|lr> + |rl>)/sqrt(2).
PureState psi_slits();

// <psi|rho|psi> for a normalized target.
double fidelity(const DensityMatrix& rho, const PureState& psi);

BlochPoint bloch_of(const PureState& state);
BlochPoint bloch_of(const DensityMatrix& rho);

// Pure state with the given Bloch direction (the vector is normalized first;
// the zero vector throws DataError). The |l> amplitude is real and >= 0.
PureState state_from_bloch(const BlochPoint& b);

// (I + b.sigma)/2 for |b| <= 1.
DensityMatrix density_from_bloch(const BlochPoint& b);

// Nearest trace-one PSD matrix in Frobenius norm: eigenvalues are projected
// onto the probability simplex and the eigenvectors kept.
DensityMatrix project_physical(const ComplexMatrix& hermitian);
inline DensityMatrix project_physical(const DensityMatrix& rho) {
  return project_physical(rho.matrix());
}

enum class Subsystem { kA, kB };

// <m|_side rho_ab |m>_side for a two-qubit rho_ab; returns the
// non-normalized state left on the other arm. Its trace is the (relative)
// probability of the conditioning outcome.
DensityMatrix condition(const DensityMatrix& rho_ab, const PureState& m, Subsystem side);

// Partial trace over one arm of a two-qubit state.
DensityMatrix reduced_state(const DensityMatrix& rho_ab, Subsystem traced_out);

// (1 - p) rho + p I/d, trace preserved.
DensityMatrix depolarize(const DensityMatrix& rho, double p);

// Exchange of arms A and B for a two-qubit operator.
ComplexMatrix swap_arms(const ComplexMatrix& m);

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace slitqubit
