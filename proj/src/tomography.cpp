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

#include "slitqubit/tomography.hpp"

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "slitqubit/errors.hpp"
#include "slitqubit/quadrature.hpp"

namespace slitqubit {

const std::array<std::string, kSettingCount> kSettingLabels = {
    "|l>", "|r>", "|l>+|r>", "|l>-|r>", "|l>+i|r>", "|l>-i|r>"};

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinBetaGap = 0.05;
constexpr int kMinFitSamples = 30;

// Setting pair k (z, x, y) -> index into {I, x, y, z}.
constexpr std::array<int, 3> kPairAxis = {3, 1, 2};

const std::array<PauliAxis, 4> kAxes = {PauliAxis::kIdentity, PauliAxis::kX, PauliAxis::kY,
                                        PauliAxis::kZ};

Eigen::Vector2cd setting_state(int s) {
  const double h = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  switch (s) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {h, h};
    case 3: return {h, -h};
    case 4: return {h, i * h};
    default: return {h, -i * h};
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Pauli tables

void SettingTable::validate(double block_tolerance) const {
  for (const auto& row : p) {
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) throw DataError("setting table: entries must lie in [0, 1]");
    }
  }
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const double s = p[2 * j][2 * i] + p[2 * j][2 * i + 1] + p[2 * j + 1][2 * i] +
                       p[2 * j + 1][2 * i + 1];
      if (std::abs(s - 1.0) > block_tolerance) {
        throw DataError("setting table: block (B " + std::to_string(j) + ", A " +
                        std::to_string(i) + ") sums to " + std::to_string(s));
      }
    }
  }
}

SettingTable SettingTable::from_state(const DensityMatrix& rho_ab) {
  if (rho_ab.dim() != 4) throw DimensionMismatch("SettingTable::from_state: expected 4x4");
  SettingTable t;
  for (int b = 0; b < kSettingCount; ++b) {
    for (int a = 0; a < kSettingCount; ++a) {
      const ComplexVector v = tensor(ComplexVector(setting_state(a)), ComplexVector(setting_state(b)));
      t.p[b][a] = std::max(0.0, v.dot(rho_ab.matrix() * v).real());
    }
  }
  return t;
}

PauliReconstruction pauli_reconstruct(const SettingTable& t) {
  t.validate();
  Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
  c(0, 0) = 1.0;
  std::array<double, 3> marginal_a{};
  std::array<double, 3> marginal_b{};
  for (int j = 0; j < 3; ++j) {    // arm B pair
    for (int i = 0; i < 3; ++i) {  // arm A pair
      const double pp = t.p[2 * j][2 * i];
      const double pm = t.p[2 * j][2 * i + 1];
      const double mp = t.p[2 * j + 1][2 * i];
      const double mm = t.p[2 * j + 1][2 * i + 1];
      const double total = pp + pm + mp + mm;
      c(kPairAxis[i], kPairAxis[j]) = (pp - pm - mp + mm) / total;
      marginal_a[i] += ((pp + mp) - (pm + mm)) / total / 3.0;
      marginal_b[j] += ((pp + pm) - (mp + mm)) / total / 3.0;
    }
  }
  for (int k = 0; k < 3; ++k) {
    c(kPairAxis[k], 0) = marginal_a[k];
    c(0, kPairAxis[k]) = marginal_b[k];
  }
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      rho += 0.25 * c(i, j) * tensor(ComplexMatrix(pauli(kAxes[i])), ComplexMatrix(pauli(kAxes[j])));
    }
  }
  DensityMatrix raw(rho);
  DensityMatrix projected = project_physical(raw);
  return {c, std::move(raw), std::move(projected)};
}

// ---------------------------------------------------------------------------
// Single-scan pattern inversion

double overlap_beta(double delta_phi) {
  const double t = delta_phi * delta_phi;
  // Series below 1e-2: the closed form cancels catastrophically there.
  if (std::abs(delta_phi) < 1e-2) return 1.0 - t / 5.0 + 2.0 * t * t / 105.0 - t * t * t / 945.0;
  return 1.5 / (delta_phi * delta_phi) * (1.0 - sinc(2.0 * delta_phi));
}

PatternInversion pattern_invert(const ScanRecord& input, const OpticalGeometry& g) {
  const ScanRecord scan =
      input.kind == ScanKind::kCounts ? to_probability_density(input) : input;
  if (g.slit_count() != 2) throw DimensionMismatch("pattern_invert: needs a double slit");
  if (g.at_focal_plane()) {
    throw InvalidGeometry(
        "pattern_invert: focal plane has delta_phi = 0 and beta = 1; the population "
        "formula is singular there. Use fit_conditional instead.");
  }
  const DerivedScales s = derive_scales(g);
  const double beta = overlap_beta(s.delta_phi);
  if (std::abs(1.0 - beta) < kMinBetaGap) {
    throw InvalidGeometry("pattern_invert: beta = " + std::to_string(beta) +
                          " is too close to 1 (population formula singular); use "
                          "fit_conditional instead");
  }
  scan.validate();
  const std::vector<double> xs = scan.xs();
  const std::vector<double> p = scan.values();
  const double reach = (2.0 * kPi + 0.5 * s.delta_phi) / s.K;
  if (xs.size() < 3 || xs.front() > -reach || xs.back() < reach) {
    throw DataError("pattern_invert: scan must cover the central three lobes of both slits");
  }
  const double d = slit_separation(g);
  std::vector<double> pop(xs.size());
  std::vector<double> coh_re(xs.size());
  std::vector<double> coh_im(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double u = s.K * xs[i];
    const double left = sinc(u - 0.5 * s.delta_phi);
    const double right = sinc(u + 0.5 * s.delta_phi);
    pop[i] = (left * left - right * right) * p[i];
    const cplx w = std::polar(left * right * p[i], 2.0 * d / g.slit_width * u);
    coh_re[i] = w.real();
    coh_im[i] = w.imag();
  }
  PatternInversion out{beta, 0.0, 0.0, DensityMatrix::maximally_mixed(2),
                       DensityMatrix::maximally_mixed(2)};
  out.delta = 1.5 / (1.0 - beta) * trapezoid(xs, pop);
  out.coherence = 1.5 / beta * cplx(trapezoid(xs, coh_re), trapezoid(xs, coh_im));
  Eigen::Matrix2cd rho;
  rho << 0.5 * (1.0 + out.delta), out.coherence, std::conj(out.coherence), 0.5 * (1.0 - out.delta);
  out.raw = DensityMatrix(rho);
  out.projected = project_physical(out.raw);
  return out;
}

// ---------------------------------------------------------------------------
// Conditional least-squares fits

namespace {

// rho = T^dag T with T = [[t0, 0], [t2 + i t3, t1]].
Eigen::Matrix2cd gram_from_params(const Eigen::VectorXd& p) {
  const cplx t10(p(2), p(3));
  Eigen::Matrix2cd r;
  r(0, 0) = p(0) * p(0) + std::norm(t10);
  r(0, 1) = std::conj(t10) * p(1);
  r(1, 0) = t10 * p(1);
  r(1, 1) = p(1) * p(1);
  return r;
}

Eigen::Vector4d params_from_density(const Eigen::Matrix2cd& rho) {
  const double t1 = std::sqrt(std::max(rho(1, 1).real(), 1e-12));
  const cplx t10 = std::conj(rho(0, 1)) / t1;
  const double t0 = std::sqrt(std::max(rho(0, 0).real() - std::norm(t10), 1e-12));
  return {t0, t1, t10.real(), t10.imag()};
}

std::vector<BlochPoint> fit_starts() {
  std::vector<BlochPoint> starts = {{0.0, 0.0, 0.0}};
  const double c = 0.9 / std::sqrt(3.0);
  for (int sx : {1, -1}) {
    for (int sy : {1, -1}) {
      for (int sz : {1, -1}) starts.push_back({sx * c, sy * c, sz * c});
    }
  }
  return starts;
}

// |m_l|^2, |m_r|^2, Re and Im of conj(m_l) m_r, aperture-averaged, at every
// scan position. The pattern of any rho is linear in these.
struct PatternBasis {
  std::vector<std::array<double, 4>> rows;
};

PatternBasis pattern_basis(const OpticalGeometry& g, std::span<const double> xs,
                           double detector_width, AmplitudeModel model) {
  PatternBasis basis;
  basis.rows.reserve(xs.size());
  for (double x : xs) {
    std::array<double, 4> row{};
    const auto& rule = gauss_legendre(24);
    const int nodes = detector_width > 0.0 ? 24 : 1;
    for (int k = 0; k < nodes; ++k) {
      const double xi = nodes == 1 ? x : x + 0.5 * detector_width * rule.nodes[k];
      const double w = nodes == 1 ? 1.0 : 0.5 * rule.weights[k];
      const ComplexVector m = measurement_state(g, xi, model).amplitudes();
      const cplx z = std::conj(m(0)) * m(1);
      row[0] += w * std::norm(m(0));
      row[1] += w * std::norm(m(1));
      row[2] += w * z.real();
      row[3] += w * z.imag();
    }
    basis.rows.push_back(row);
  }
  return basis;
}

double pattern_value(const std::array<double, 4>& row, const Eigen::Matrix2cd& rho) {
  // m^dag rho m = rho_ll |m_l|^2 + rho_rr |m_r|^2 + 2 Re(rho_lr conj(m_l) m_r)
  return rho(0, 0).real() * row[0] + rho(1, 1).real() * row[1] +
         2.0 * rho(0, 1).real() * row[2] - 2.0 * rho(0, 1).imag() * row[3];
}

std::vector<double> sample_weights(const ScanRecord& scan, FitWeighting w) {
  std::vector<double> out(scan.samples.size(), 1.0);
  if (w == FitWeighting::kPoisson) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = 1.0 / std::sqrt(std::max(scan.samples[i].value, 1.0));
    }
  }
  return out;
}

struct FitFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const ScanRecord* scan = nullptr;
  const OpticalGeometry* geometry = nullptr;
  const PatternBasis* fixed_basis = nullptr;  // used when L is not fitted
  FitOptions opts;
  std::vector<double> weights;
  double scale = 1.0;
  int n_inputs = 4;

  int inputs() const { return n_inputs; }
  int values() const { return static_cast<int>(scan->samples.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& residual) const {
    const Eigen::Matrix2cd gram = gram_from_params(p);
    PatternBasis local;
    const PatternBasis* basis = fixed_basis;
    if (opts.fit_L) {
      const OpticalGeometry g = geometry->with_L(p(4));
      try {
        derive_scales(g);
      } catch (const InvalidGeometry&) {
        residual.setConstant(1e150);
        return 0;
      }
      local = pattern_basis(g, scan->xs(), scan->detector_width, opts.model);
      basis = &local;
    }
    for (int i = 0; i < values(); ++i) {
      const double model = scale * pattern_value(basis->rows[i], gram);
      residual(i) = weights[i] * (scan->samples[i].value - model);
    }
    return 0;
  }
};

}  // namespace

double best_amplitude(const ScanRecord& scan, const OpticalGeometry& g, const DensityMatrix& rho,
                      const FitOptions& opts) {
  const PatternBasis basis = pattern_basis(g, scan.xs(), scan.detector_width, opts.model);
  const std::vector<double> w = sample_weights(scan, opts.weighting);
  const Eigen::Matrix2cd r = rho.normalized().matrix();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < scan.samples.size(); ++i) {
    const double p = pattern_value(basis.rows[i], r);
    num += w[i] * w[i] * scan.samples[i].value * p;
    den += w[i] * w[i] * p * p;
  }
  if (!(den > 0.0)) throw DataError("best_amplitude: model pattern vanishes on the scan");
  return num / den;
}

double fit_residual(const ScanRecord& scan, const OpticalGeometry& g, const DensityMatrix& rho,
                    double amplitude, const FitOptions& opts) {
  const PatternBasis basis = pattern_basis(g, scan.xs(), scan.detector_width, opts.model);
  const std::vector<double> w = sample_weights(scan, opts.weighting);
  const Eigen::Matrix2cd r = rho.normalized().matrix();
  double acc = 0.0;
  for (std::size_t i = 0; i < scan.samples.size(); ++i) {
    const double e = w[i] * (scan.samples[i].value - amplitude * pattern_value(basis.rows[i], r));
    acc += e * e;
  }
  return acc;
}

ConditionalFit fit_conditional(const ScanRecord& scan, const OpticalGeometry& g,
                               const FitOptions& opts) {
  if (scan.kind != ScanKind::kCounts) throw InvalidArgument("fit_conditional: expects counts");
  if (g.slit_count() != 2) throw DimensionMismatch("fit_conditional: needs a double slit");
  if (static_cast<int>(scan.samples.size()) < kMinFitSamples) {
    throw DataError("fit_conditional: need at least 30 samples");
  }
  scan.validate();
  const auto [lo, hi] = std::minmax_element(
      scan.samples.begin(), scan.samples.end(),
      [](const ScanSample& a, const ScanSample& b) { return a.value < b.value; });
  if (lo->value == hi->value) throw DataError("fit_conditional: degenerate scan (all counts equal)");

  const PatternBasis basis = pattern_basis(g, scan.xs(), scan.detector_width, opts.model);

  FitFunctor functor;
  functor.scan = &scan;
  functor.geometry = &g;
  functor.fixed_basis = &basis;
  functor.opts = opts;
  functor.weights = sample_weights(scan, opts.weighting);
  functor.n_inputs = opts.fit_L ? 5 : 4;
  {
    // Scale so that T^dag T is O(1) for the maximally mixed pattern.
    double num = 0.0;
    double den = 0.0;
    const Eigen::Matrix2cd mixed = Eigen::Matrix2cd::Identity() * 0.5;
    for (std::size_t i = 0; i < scan.samples.size(); ++i) {
      const double p = pattern_value(basis.rows[i], mixed);
      num += scan.samples[i].value * p;
      den += p * p;
    }
    if (!(den > 0.0) || !(num > 0.0)) throw DataError("fit_conditional: empty model pattern");
    functor.scale = num / den;
  }

  ConditionalFit best{DensityMatrix::maximally_mixed(2), 0.0, g.slit_to_lens,
                      std::numeric_limits<double>::infinity(), -1};
  const std::vector<BlochPoint> starts = fit_starts();
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const Eigen::Matrix2cd rho0 = density_from_bloch(starts[k]).matrix();
    Eigen::VectorXd p(functor.n_inputs);
    p.head<4>() = params_from_density(rho0);
    if (opts.fit_L) p(4) = g.slit_to_lens;
    {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < scan.samples.size(); ++i) {
        const double v = functor.scale * pattern_value(basis.rows[i], rho0);
        num += functor.weights[i] * functor.weights[i] * scan.samples[i].value * v;
        den += functor.weights[i] * functor.weights[i] * v * v;
      }
      p.head<4>() *= std::sqrt(std::max(num / den, 1e-6));
    }

    Eigen::NumericalDiff<FitFunctor> diff(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<FitFunctor>, double> lm(diff);
    lm.parameters.maxfev = opts.max_function_evaluations;
    lm.parameters.xtol = 1e-12;
    lm.parameters.ftol = 1e-12;
    const auto status = lm.minimize(p);
    const bool converged = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                           status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation &&
                           status != Eigen::LevenbergMarquardtSpace::UserAsked;
    if (!converged) continue;

    Eigen::VectorXd r(functor.values());
    functor(p, r);
    const double residual = r.squaredNorm();
    if (!(residual < best.residual)) continue;
    const Eigen::Matrix2cd gram = gram_from_params(p);
    const double trace = gram.trace().real();
    if (!(trace > 0.0)) continue;
    best = ConditionalFit{DensityMatrix(gram / trace), functor.scale * trace,
                          opts.fit_L ? p(4) : g.slit_to_lens, residual, static_cast<int>(k)};
  }
  if (best.start_index < 0) {
    throw ConvergenceError("fit_conditional: no starting point converged");
  }
  return best;
}

// ---------------------------------------------------------------------------
// Dual frames and two-qubit assembly

DualFrame build_dual_frame(const OpticalGeometry& g, std::span<const double> points,
                           AmplitudeModel model) {
  if (g.slit_count() != 2) throw DimensionMismatch("build_dual_frame: needs a double slit");
  if (points.size() < 4) {
    throw RankDeficient("build_dual_frame: " + std::to_string(points.size()) +
                        " points cannot span the 4-dimensional operator space");
  }
  DualFrame frame;
  frame.points.assign(points.begin(), points.end());
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd t(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    frame.effects.push_back(measurement_effect(g, points[i], model));
    for (int j = 0; j < 4; ++j) {
      t(i, j) = (frame.effects.back().op * pauli(kAxes[j])).trace().real();
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (!(sv(3) > 1e-10 * sv(0))) {
    throw RankDeficient("build_dual_frame: effects do not span the operator space");
  }
  // Conditioning of the directions alone: rows rescaled to unit trace so
  // that dim detector positions do not count as poor geometry.
  Eigen::MatrixXd unit = t;
  for (Eigen::Index i = 0; i < n; ++i) unit.row(i) /= t(i, 0);
  const Eigen::VectorXd usv = Eigen::JacobiSVD<Eigen::MatrixXd>(unit).singularValues();
  frame.condition_number = usv(0) / usv(3);
  const Eigen::MatrixXd pinv =
      svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Matrix2cd lambda = Eigen::Matrix2cd::Zero();
    for (int j = 0; j < 4; ++j) lambda += pinv(j, i) * pauli(kAxes[j]);
    frame.lambdas.push_back(lambda);
  }
  return frame;
}

TwoQubitReconstruction reconstruct_two_qubit(std::span<const DensityMatrix> conditionals,
                                             const DualFrame& frame) {
  if (conditionals.size() != frame.lambdas.size()) {
    throw DimensionMismatch("reconstruct_two_qubit: " + std::to_string(conditionals.size()) +
                            " conditionals for " + std::to_string(frame.lambdas.size()) +
                            " frame points");
  }
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  for (std::size_t i = 0; i < conditionals.size(); ++i) {
    if (conditionals[i].dim() != 2) throw DimensionMismatch("reconstruct_two_qubit: conditional");
    rho += tensor(conditionals[i].matrix(), ComplexMatrix(frame.lambdas[i]));
  }
  rho = (0.5 * (rho + rho.adjoint())).eval();
  const double trace = rho.trace().real();
  if (!(trace > 0.0)) throw DataError("reconstruct_two_qubit: reconstructed trace is not positive");
  DensityMatrix raw(rho / trace);
  DensityMatrix projected = project_physical(raw);
  return {std::move(raw), std::move(projected)};
}

std::vector<double> conditional_weights(std::span<const ScanRecord> scans) {
  std::vector<double> out;
  double grand = 0.0;
  for (const ScanRecord& s : scans) {
    const double net = std::max(0.0, s.total() - s.accidental_rate * s.samples.size());
    out.push_back(net);
    grand += net;
  }
  if (!(grand > 0.0)) throw DataError("conditional_weights: no signal counts");
  for (double& w : out) w /= grand;
  return out;
}

ScanPipelineResult reconstruct_from_scans(std::span<const ScanRecord> scans,
                                          const OpticalGeometry& g_a,
                                          const OpticalGeometry& g_b, const FitOptions& opts) {
  std::vector<double> points;
  ScanPipelineResult out{{}, conditional_weights(scans), {}, {DensityMatrix::maximally_mixed(4),
                                                              DensityMatrix::maximally_mixed(4)}};
  for (const ScanRecord& s : scans) {
    if (!s.arm_b_x) throw DataError("reconstruct_from_scans: scan lacks the arm B position");
    points.push_back(*s.arm_b_x);
    out.fits.push_back(fit_conditional(s, g_a, opts));
  }
  out.frame = build_dual_frame(g_b, points, opts.model);
  std::vector<DensityMatrix> conditionals;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    conditionals.emplace_back(out.fits[i].rho.matrix() * out.weights[i],
                              Normalization::kUnnormalized);
  }
  out.state = reconstruct_two_qubit(conditionals, out.frame);
  return out;
}

}  // namespace slitqubit
