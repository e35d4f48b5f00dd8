// Copyright 2026 The hamxform Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense matrices, channels in superoperator form, and the channel distances
// used for verification.
//
// Vectorization is column stacking (Eigen's native layout), so
// vec(A X B) = (B^T (x) A) vec(X) and a unitary U acts as conj(U) (x) U.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <json.hpp>

#include "hamxform/pauli.hpp"
#include "hamxform/rng.hpp"

namespace hamxform {

// ---------------------------------------------------------------------------
// Basic matrix functions

/// e^{-iHt} by Hermitian eigendecomposition.
inline ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t) {
  const double defect = hermitian_defect(h);
  if (defect > kHermitianTolerance) {
    std::ostringstream os;
    os << "expm_hermitian: input is not Hermitian (max asymmetry " << defect << ")";
    throw std::invalid_argument(os.str());
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("expm_hermitian: eigendecomposition failed");
  }
  const Eigen::VectorXd& lambda = es.eigenvalues();
  ComplexVector phases(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    phases(k) = std::exp(Complex(0.0, -lambda(k) * t));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Largest minus smallest eigenvalue.
inline double spectral_range(const ComplexMatrix& h) {
  if (h.rows() == 0) {
    return 0.0;
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
}

inline double min_eigenvalue(const ComplexMatrix& h) {
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// ||A||_1 = sum of singular values.
inline double trace_norm(const ComplexMatrix& a) {
  if (a.size() == 0) {
    return 0.0;
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

inline double unitarity_defect(const ComplexMatrix& u) {
  return (u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

/// Principal square root of a positive semidefinite matrix.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------
// States

class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
      throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
    }
    if (hermitian_defect(rho_) > kTolerance) {
      throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    }
    const double tr_err = std::abs(rho_.trace() - Complex(1.0, 0.0));
    if (tr_err > kTolerance) {
      throw std::invalid_argument("DensityMatrix: trace differs from 1 by " + std::to_string(tr_err));
    }
    const double lmin = min_eigenvalue(rho_);
    if (lmin < -kTolerance) {
      throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(lmin));
    }
  }

  static DensityMatrix pure(const ComplexVector& psi) {
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > kTolerance) {
      throw std::invalid_argument("DensityMatrix::pure: state vector is not normalized");
    }
    return DensityMatrix(psi * psi.adjoint());
  }

  const ComplexMatrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }

 private:
  ComplexMatrix rho_;
};

/// Traces out the leading factor of dimension `lead` from a (lead * rest)-dim operator.
inline ComplexMatrix trace_leading(const ComplexMatrix& m, Eigen::Index lead) {
  if (lead <= 0 || m.rows() % lead != 0 || m.rows() != m.cols()) {
    throw std::invalid_argument("trace_leading: dimension mismatch");
  }
  const Eigen::Index rest = m.rows() / lead;
  ComplexMatrix out = ComplexMatrix::Zero(rest, rest);
  for (Eigen::Index a = 0; a < lead; ++a) {
    out += m.block(a * rest, a * rest, rest, rest);
  }
  return out;
}

/// Traces out the trailing factor of dimension `trail`.
inline ComplexMatrix trace_trailing(const ComplexMatrix& m, Eigen::Index trail) {
  if (trail <= 0 || m.rows() % trail != 0 || m.rows() != m.cols()) {
    throw std::invalid_argument("trace_trailing: dimension mismatch");
  }
  const Eigen::Index rest = m.rows() / trail;
  ComplexMatrix out = ComplexMatrix::Zero(rest, rest);
  for (Eigen::Index i = 0; i < rest; ++i) {
    for (Eigen::Index j = 0; j < rest; ++j) {
      Complex s = 0.0;
      for (Eigen::Index r = 0; r < trail; ++r) {
        s += m(i * trail + r, j * trail + r);
      }
      out(i, j) = s;
    }
  }
  return out;
}

/// Traces out the single leading ancilla qubit.
inline DensityMatrix partial_trace_ancilla(const DensityMatrix& rho) {
  if (rho.dim() % 2 != 0 || rho.dim() < 4) {
    throw std::invalid_argument("partial_trace_ancilla: dimension must be 2 * 2^n");
  }
  return DensityMatrix(trace_leading(rho.matrix(), 2));
}

/// Haar-random pure state via a normalized complex Gaussian vector.
inline ComplexVector haar_state(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector psi(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double re = g(rng);
    const double im = g(rng);
    psi(k) = Complex(re, im);
  }
  return psi / psi.norm();
}

/// Haar-random unitary (QR of a Ginibre matrix with phase fix).
inline ComplexMatrix haar_unitary(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix z(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double re = g(rng);
      const double im = g(rng);
      z(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    const double a = std::abs(d);
    if (a > 0.0) {
      q.col(k) *= d / a;
    }
  }
  return q;
}

inline ComplexMatrix random_hermitian(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double re = g(rng);
      const double im = g(rng);
      a(i, j) = Complex(re, im);
    }
  }
  return 0.5 * (a + a.adjoint());
}

// ---------------------------------------------------------------------------
// Channels

/// A linear map L(C^in) -> L(C^out) as a (out^2 x in^2) superoperator acting
/// on column-stacked operators.
class ChannelMatrix {
 public:
  static constexpr double kCptpTolerance = 1e-8;

  ChannelMatrix() = default;

  ChannelMatrix(ComplexMatrix super, Eigen::Index in_dim, Eigen::Index out_dim)
      : super_(std::move(super)), in_dim_(in_dim), out_dim_(out_dim) {
    if (super_.rows() != out_dim * out_dim || super_.cols() != in_dim * in_dim) {
      throw std::invalid_argument("ChannelMatrix: superoperator shape does not match dimensions");
    }
  }

  static ChannelMatrix identity(Eigen::Index dim) {
    return ChannelMatrix(ComplexMatrix::Identity(dim * dim, dim * dim), dim, dim);
  }

  const ComplexMatrix& super() const { return super_; }
  Eigen::Index in_dim() const { return in_dim_; }
  Eigen::Index out_dim() const { return out_dim_; }

  ComplexMatrix apply(const ComplexMatrix& x) const {
    if (x.rows() != in_dim_ || x.cols() != in_dim_) {
      throw std::invalid_argument("ChannelMatrix::apply: operator dimension mismatch");
    }
    ComplexVector v = Eigen::Map<const ComplexVector>(x.data(), x.size());
    ComplexVector y = super_ * v;
    return Eigen::Map<const ComplexMatrix>(y.data(), out_dim_, out_dim_);
  }

  /// (E (x) id_ref)(x) for an operator on in (x) ref, ref trailing.
  ComplexMatrix apply_with_reference(const ComplexMatrix& x, Eigen::Index ref_dim) const {
    if (ref_dim <= 0 || x.rows() != in_dim_ * ref_dim || x.cols() != x.rows()) {
      throw std::invalid_argument("ChannelMatrix::apply_with_reference: dimension mismatch");
    }
    if (ref_dim == 1) {
      return apply(x);
    }
    ComplexMatrix out = ComplexMatrix::Zero(out_dim_ * ref_dim, out_dim_ * ref_dim);
    ComplexMatrix block(in_dim_, in_dim_);
    for (Eigen::Index a = 0; a < ref_dim; ++a) {
      for (Eigen::Index b = 0; b < ref_dim; ++b) {
        for (Eigen::Index s = 0; s < in_dim_; ++s) {
          for (Eigen::Index r = 0; r < in_dim_; ++r) {
            block(s, r) = x(s * ref_dim + a, r * ref_dim + b);
          }
        }
        const ComplexMatrix y = apply(block);
        for (Eigen::Index s = 0; s < out_dim_; ++s) {
          for (Eigen::Index r = 0; r < out_dim_; ++r) {
            out(s * ref_dim + a, r * ref_dim + b) = y(s, r);
          }
        }
      }
    }
    return out;
  }

 private:
  ComplexMatrix super_;
  Eigen::Index in_dim_ = 0;
  Eigen::Index out_dim_ = 0;
};

using ChannelMixture = std::vector<std::pair<double, ChannelMatrix>>;

inline ChannelMatrix unitary_channel(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) {
    throw std::invalid_argument("unitary_channel: matrix is not square");
  }
  return ChannelMatrix(kron(u.conjugate(), u), u.rows(), u.rows());
}

/// x -> A x B^dagger, the general conjugation superoperator conj(B) (x) A.
inline ChannelMatrix sandwich_channel(const ComplexMatrix& a, const ComplexMatrix& b) {
  return ChannelMatrix(kron(b.conjugate(), a), a.cols(), a.rows());
}

inline ChannelMatrix mixture_channel(const ChannelMixture& parts) {
  if (parts.empty()) {
    throw std::invalid_argument("mixture_channel: empty mixture");
  }
  double total = 0.0;
  for (const auto& [p, e] : parts) {
    if (p < 0.0) {
      throw std::invalid_argument("mixture_channel: negative probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw std::invalid_argument("mixture_channel: probabilities sum to " + std::to_string(total));
  }
  const auto in = parts.front().second.in_dim();
  const auto out = parts.front().second.out_dim();
  ComplexMatrix acc = ComplexMatrix::Zero(out * out, in * in);
  for (const auto& [p, e] : parts) {
    if (e.in_dim() != in || e.out_dim() != out) {
      throw std::invalid_argument("mixture_channel: dimension mismatch");
    }
    acc += p * e.super();
  }
  return ChannelMatrix(std::move(acc), in, out);
}

/// a after b.
inline ChannelMatrix compose(const ChannelMatrix& a, const ChannelMatrix& b) {
  if (a.in_dim() != b.out_dim()) {
    throw std::invalid_argument("compose: dimension mismatch");
  }
  return ChannelMatrix(a.super() * b.super(), b.in_dim(), a.out_dim());
}

/// E^N by repeated squaring.
inline ChannelMatrix channel_power(const ChannelMatrix& e, std::uint64_t n) {
  if (e.in_dim() != e.out_dim()) {
    throw std::invalid_argument("channel_power: channel is not an endomorphism");
  }
  ComplexMatrix result = ComplexMatrix::Identity(e.super().rows(), e.super().cols());
  ComplexMatrix base = e.super();
  bool first = true;
  while (n > 0) {
    if (n & 1u) {
      if (first) {
        result = base;
        first = false;
      } else {
        result = (result * base).eval();
      }
    }
    n >>= 1;
    if (n > 0) {
      base = (base * base).eval();
    }
  }
  return ChannelMatrix(std::move(result), e.in_dim(), e.out_dim());
}

/// rho -> |0><0| (x) rho, ancilla leading.
inline ChannelMatrix prepare_ancilla_zero(Eigen::Index sys_dim) {
  ComplexMatrix iso = ComplexMatrix::Zero(2 * sys_dim, sys_dim);
  iso.topRows(sys_dim) = ComplexMatrix::Identity(sys_dim, sys_dim);
  return sandwich_channel(iso, iso);
}

/// Partial trace over the leading ancilla qubit as a channel.
inline ChannelMatrix trace_out_ancilla(Eigen::Index sys_dim) {
  const Eigen::Index d = 2 * sys_dim;
  ComplexMatrix super = ComplexMatrix::Zero(sys_dim * sys_dim, d * d);
  for (Eigen::Index a = 0; a < 2; ++a) {
    for (Eigen::Index s = 0; s < sys_dim; ++s) {
      for (Eigen::Index r = 0; r < sys_dim; ++r) {
        const Eigen::Index col = (a * sys_dim + s) + (a * sys_dim + r) * d;
        super(s + r * sys_dim, col) = 1.0;
      }
    }
  }
  return ChannelMatrix(std::move(super), d, sys_dim);
}

/// Normalized Choi state (1/d) sum_{ab} |a><b| (x) E(|a><b|), input copy leading.
inline ComplexMatrix choi(const ChannelMatrix& e) {
  const Eigen::Index din = e.in_dim();
  const Eigen::Index dout = e.out_dim();
  ComplexMatrix j = ComplexMatrix::Zero(din * dout, din * dout);
  for (Eigen::Index a = 0; a < din; ++a) {
    for (Eigen::Index b = 0; b < din; ++b) {
      const auto col = e.super().col(a + b * din);
      for (Eigen::Index s = 0; s < dout; ++s) {
        for (Eigen::Index r = 0; r < dout; ++r) {
          j(a * dout + s, b * dout + r) = col(s + r * dout);
        }
      }
    }
  }
  return j / static_cast<double>(din);
}

struct CptpReport {
  double min_choi_eigenvalue = 0.0;
  double trace_preservation_defect = 0.0;
  double hermiticity_defect = 0.0;
  bool ok = false;
};

inline CptpReport check_cptp(const ChannelMatrix& e, double tol = ChannelMatrix::kCptpTolerance) {
  const ComplexMatrix j = choi(e);
  CptpReport r;
  r.hermiticity_defect = hermitian_defect(j);
  r.min_choi_eigenvalue = min_eigenvalue(j);
  // Tracing the output leaves I/d_in on the input copy.
  const ComplexMatrix marginal = trace_trailing(j, e.out_dim());
  const ComplexMatrix expected =
      ComplexMatrix::Identity(e.in_dim(), e.in_dim()) / static_cast<double>(e.in_dim());
  r.trace_preservation_defect = (marginal - expected).cwiseAbs().maxCoeff() * static_cast<double>(e.in_dim());
  r.ok = r.hermiticity_defect <= tol && r.min_choi_eigenvalue >= -tol && r.trace_preservation_defect <= tol;
  return r;
}

/// (1/2) || J(E1) - J(E2) ||_1 with trace-one Choi states.
inline double choi_distance(const ChannelMatrix& e1, const ChannelMatrix& e2) {
  if (e1.in_dim() != e2.in_dim() || e1.out_dim() != e2.out_dim()) {
    throw std::invalid_argument("choi_distance: dimension mismatch");
  }
  return 0.5 * trace_norm(choi(e1) - choi(e2));
}

/// Maximally entangled state on in (x) ref with ref_dim == in_dim.
inline ComplexVector maximally_entangled(Eigen::Index dim) {
  ComplexVector psi = ComplexVector::Zero(dim * dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    psi(k * dim + k) = 1.0;
  }
  return psi / std::sqrt(static_cast<double>(dim));
}

struct PureStateSup {
  double value = 0.0;
  ComplexVector argmax;
  std::vector<double> running_max;
};

/// Apply U (x) I to a pure state on sys (x) ref.
inline ComplexVector apply_unitary_with_reference(const ComplexMatrix& u, const ComplexVector& psi,
                                                  Eigen::Index ref_dim) {
  const Eigen::Index d = u.rows();
  Eigen::Map<const ComplexMatrix> m(psi.data(), ref_dim, d);  // m(r, s) = psi[s * ref + r]
  ComplexMatrix out = m * u.transpose();
  return Eigen::Map<const ComplexVector>(out.data(), out.size());
}

/// max over sampled pure |psi> on sys (x) ref of
/// || (U (x) I) psi (U (x) I)^dagger - sum_j p_j (E_j (x) I)(psi) ||_1.
///
/// With `include_maximally_entangled` the maximally entangled input is the
/// first candidate, so the result dominates twice the Choi distance.
inline PureStateSup pure_state_error_sup(const ComplexMatrix& u, const ChannelMixture& mixture, std::size_t trials,
                                         Rng& rng, Eigen::Index ref_dim = 1,
                                         bool include_maximally_entangled = false) {
  if (trials == 0) {
    throw std::invalid_argument("pure_state_error_sup: trials must be at least 1");
  }
  const ChannelMatrix avg = mixture_channel(mixture);
  const Eigen::Index d = u.rows();
  if (avg.in_dim() != d || avg.out_dim() != d) {
    throw std::invalid_argument("pure_state_error_sup: mixture dimension does not match U");
  }
  if (include_maximally_entangled && ref_dim != d) {
    throw std::invalid_argument("pure_state_error_sup: maximally entangled input needs ref_dim == dim");
  }
  PureStateSup out;
  out.value = -1.0;
  out.running_max.reserve(trials);
  for (std::size_t k = 0; k < trials; ++k) {
    const ComplexVector psi =
        (include_maximally_entangled && k == 0) ? maximally_entangled(d) : haar_state(d * ref_dim, rng);
    const ComplexMatrix rho = psi * psi.adjoint();
    const ComplexVector upsi = apply_unitary_with_reference(u, psi, ref_dim);
    const ComplexMatrix ideal = upsi * upsi.adjoint();
    const double err = trace_norm(ideal - avg.apply_with_reference(rho, ref_dim));
    if (err > out.value) {
      out.value = err;
      out.argmax = psi;
    }
    out.running_max.push_back(out.value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON fixtures: matrices as nested [re, im] pairs.

inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) {
    return {j.get<double>(), 0.0};
  }
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("complex entry must be a number or an [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("matrix must be a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) {
      throw std::invalid_argument("matrix rows have unequal length");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = complex_from_json(j[i][k]);
    }
  }
  return m;
}

inline nlohmann::json vector_to_json(const ComplexVector& v) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back({v(i).real(), v(i).imag()});
  }
  return out;
}

inline ComplexVector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("vector must be a non-empty array");
  }
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  }
  return v;
}

}  // namespace hamxform
