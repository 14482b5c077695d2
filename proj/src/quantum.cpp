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

#include "slitqubit/quantum.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "slitqubit/errors.hpp"

namespace slitqubit {

namespace {

double max_abs_entry(const ComplexMatrix& m) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) out = std::max(out, std::abs(m.data()[i]));
  return out;
}

// Euclidean projection of v onto {w : w >= 0, sum w = 1}.
Eigen::VectorXd project_onto_simplex(const Eigen::VectorXd& v) {
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) shift = candidate;
  }
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = std::max(v(i) - shift, 0.0);
  return out;
}

}  // namespace

PureState::PureState(ComplexVector amplitudes, Normalization norm)
    : amplitudes_(std::move(amplitudes)), norm_(norm) {
  if (amplitudes_.size() == 0) throw InvalidArgument("PureState: empty amplitude vector");
  if (norm_ == Normalization::kNormalized &&
      std::abs(amplitudes_.squaredNorm() - 1.0) > kHermitianTol) {
    throw InvalidArgument("PureState: amplitudes flagged normalized have squared norm " +
                          std::to_string(amplitudes_.squaredNorm()));
  }
}

PureState PureState::basis(int dim, int index) {
  if (dim <= 0 || index < 0 || index >= dim) throw InvalidArgument("PureState::basis: bad index");
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v));
}

PureState PureState::normalized() const {
  const double n = amplitudes_.norm();
  if (!(n > 0.0)) throw DataError("PureState: cannot normalize a zero-norm state");
  return PureState(amplitudes_ / n, Normalization::kNormalized);
}

PureState PureState::scaled(cplx factor) const {
  return PureState(amplitudes_ * factor, Normalization::kUnnormalized);
}

DensityMatrix::DensityMatrix(ComplexMatrix m, Normalization norm)
    : m_(std::move(m)), norm_(norm) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw DimensionMismatch("DensityMatrix: matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, max_abs_entry(m_));
  const double asym = max_abs_entry(m_ - m_.adjoint());
  if (asym > kHermitianTol * scale) {
    throw InvalidArgument("DensityMatrix: matrix is not Hermitian (defect " +
                          std::to_string(asym) + ")");
  }
  m_ = (0.5 * (m_ + m_.adjoint())).eval();
  if (norm_ == Normalization::kNormalized && std::abs(trace() - 1.0) > kTraceTol) {
    throw InvalidArgument("DensityMatrix: trace " + std::to_string(trace()) +
                          " differs from one");
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const ComplexMatrix m = psi.amplitudes() * psi.amplitudes().adjoint();
  return DensityMatrix(m, psi.is_normalized() ? Normalization::kNormalized
                                              : Normalization::kUnnormalized);
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim <= 0) throw InvalidArgument("maximally_mixed: dim must be positive");
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

bool DensityMatrix::is_physical(double tol) const {
  if (norm_ == Normalization::kNormalized && std::abs(trace() - 1.0) > kTraceTol) return false;
  return eigenvalues().minCoeff() >= -tol;
}

DensityMatrix DensityMatrix::normalized() const {
  const double t = trace();
  if (!(t > 0.0)) throw DataError("DensityMatrix: cannot normalize a matrix with trace <= 0");
  return DensityMatrix(m_ / t, Normalization::kNormalized);
}

double BlochPoint::norm() const { return std::sqrt(bx * bx + by * by + bz * bz); }

double BlochPoint::azimuth() const { return std::atan2(by, bx); }

PauliAxis parse_pauli_axis(std::string_view token) {
  std::string t(token);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "i" || t == "identity") return PauliAxis::kIdentity;
  if (t == "x") return PauliAxis::kX;
  if (t == "y") return PauliAxis::kY;
  if (t == "z") return PauliAxis::kZ;
  throw InvalidArgument("unknown Pauli axis '" + std::string(token) + "'");
}

Eigen::Matrix2cd pauli(PauliAxis axis) {
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd m;
  switch (axis) {
    case PauliAxis::kIdentity:
      m << 1.0, 0.0, 0.0, 1.0;
      break;
    case PauliAxis::kX:  // |l><r| + |r><l|
      m << 0.0, 1.0, 1.0, 0.0;
      break;
    case PauliAxis::kY:  // -i(|l><r| - |r><l|)
      m << 0.0, -i, i, 0.0;
      break;
    case PauliAxis::kZ:  // |l><l| - |r><r|
      m << 1.0, 0.0, 0.0, -1.0;
      break;
  }
  return m;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw DimensionMismatch("tensor: both factors must be square");
  }
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

PureState psi_slits() {
  ComplexVector v = ComplexVector::Zero(4);
  v(1) = v(2) = 1.0 / std::sqrt(2.0);
  return PureState(std::move(v));
}

double fidelity(const DensityMatrix& rho, const PureState& psi) {
  if (rho.dim() != psi.dim()) {
    throw DimensionMismatch("fidelity: state dimension " + std::to_string(psi.dim()) +
                            " vs density matrix dimension " + std::to_string(rho.dim()));
  }
  if (!psi.is_normalized() || !rho.is_normalized()) {
    throw InvalidArgument("fidelity: both target and density matrix must be normalized");
  }
  const cplx f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
  return f.real();
}

BlochPoint bloch_of(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DimensionMismatch("bloch_of: expected a qubit");
  const double t = rho.trace();
  if (!(t > 0.0)) throw DataError("bloch_of: zero-trace input");
  const ComplexMatrix& m = rho.matrix();
  // <sigma_x> + i <sigma_y> = 2 rho_rl
  const cplx c = 2.0 * m(1, 0) / t;
  return {c.real(), c.imag(), (m(0, 0).real() - m(1, 1).real()) / t};
}

BlochPoint bloch_of(const PureState& state) {
  if (state.dim() != 2) throw DimensionMismatch("bloch_of: expected a qubit");
  const double n2 = state.squared_norm();
  if (!(n2 > 0.0)) throw DataError("bloch_of: zero-norm input");
  const cplx a = state[0];
  const cplx b = state[1];
  const cplx c = 2.0 * b * std::conj(a) / n2;
  return {c.real(), c.imag(), (std::norm(a) - std::norm(b)) / n2};
}

PureState state_from_bloch(const BlochPoint& b) {
  const double n = b.norm();
  if (!(n > 0.0)) throw DataError("state_from_bloch: zero Bloch vector");
  const double theta = std::acos(std::clamp(b.bz / n, -1.0, 1.0));
  const double phi = std::atan2(b.by, b.bx);
  ComplexVector v(2);
  v(0) = std::cos(theta / 2.0);
  v(1) = std::polar(std::sin(theta / 2.0), phi);
  return PureState(v.normalized());
}

DensityMatrix density_from_bloch(const BlochPoint& b) {
  if (b.norm() > 1.0 + kPhysicalTol) throw InvalidArgument("density_from_bloch: |b| > 1");
  const ComplexMatrix m = 0.5 * (pauli(PauliAxis::kIdentity) + b.bx * pauli(PauliAxis::kX) +
                                 b.by * pauli(PauliAxis::kY) + b.bz * pauli(PauliAxis::kZ));
  return DensityMatrix(m);
}

DensityMatrix project_physical(const ComplexMatrix& hermitian) {
  const DensityMatrix checked(hermitian, Normalization::kUnnormalized);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(checked.matrix());
  const Eigen::VectorXd w = project_onto_simplex(solver.eigenvalues());
  const ComplexMatrix& v = solver.eigenvectors();
  ComplexMatrix out = v * w.cast<cplx>().asDiagonal() * v.adjoint();
  out /= out.trace().real();
  return DensityMatrix(out);
}

DensityMatrix condition(const DensityMatrix& rho_ab, const PureState& m, Subsystem side) {
  if (rho_ab.dim() != 4 || m.dim() != 2) {
    throw DimensionMismatch("condition: expected a two-qubit state and a qubit projector");
  }
  const ComplexMatrix& r = rho_ab.matrix();
  const ComplexVector& v = m.amplitudes();
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  // index(a, b) = 2a + b
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
          const int row = side == Subsystem::kB ? 2 * i + k : 2 * k + i;
          const int col = side == Subsystem::kB ? 2 * j + l : 2 * l + j;
          acc += std::conj(v(k)) * r(row, col) * v(l);
        }
      }
      out(i, j) = acc;
    }
  }
  return DensityMatrix(out, Normalization::kUnnormalized);
}

DensityMatrix reduced_state(const DensityMatrix& rho_ab, Subsystem traced_out) {
  if (rho_ab.dim() != 4) throw DimensionMismatch("reduced_state: expected a two-qubit state");
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (int k = 0; k < 2; ++k) {
    out += condition(rho_ab, PureState::basis(2, k), traced_out).matrix();
  }
  return DensityMatrix(out, rho_ab.is_normalized() ? Normalization::kNormalized
                                                   : Normalization::kUnnormalized);
}

DensityMatrix depolarize(const DensityMatrix& rho, double p) {
  if (p < 0.0 || p > 1.0) throw InvalidArgument("depolarize: p must lie in [0, 1]");
  const int d = rho.dim();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d) * (rho.trace() / d);
  return DensityMatrix((1.0 - p) * rho.matrix() + p * id,
                       rho.is_normalized() ? Normalization::kNormalized
                                           : Normalization::kUnnormalized);
}

ComplexMatrix swap_arms(const ComplexMatrix& m) {
  if (m.rows() != 4 || m.cols() != 4) throw DimensionMismatch("swap_arms: expected 4x4");
  Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
  s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1.0;
  return s * m * s;
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("frobenius_distance: shape mismatch");
  }
  return (a - b).norm();
}

}  // namespace slitqubit
