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

// Test-side oracles written independently of the library code paths:
// explicit index loops, Taylor/Pade exponentials from Eigen's unsupported
// module, and hand-built Choi states.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;
using V = Eigen::VectorXcd;

inline const C I1{0.0, 1.0};

inline M pauli2(int k) {
  M m(2, 2);
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -I1, I1, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline M kron(const M& a, const M& b) {
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline M pauli_word(const std::vector<int>& v) {
  M m = pauli2(v[0]);
  for (std::size_t q = 1; q < v.size(); ++q) m = kron(m, pauli2(v[q]));
  return m;
}

/// e^{-i H t} through Eigen's generic matrix exponential (no eigensolver).
inline M expm(const M& h, double t) { return M(C(0.0, -t) * h).exp(); }

/// Tr_A of an operator on A (x) B with dim A = lead.
inline M trace_first(const M& rho, Eigen::Index lead) {
  const Eigen::Index rest = rho.rows() / lead;
  M out = M::Zero(rest, rest);
  for (Eigen::Index i = 0; i < rest; ++i)
    for (Eigen::Index j = 0; j < rest; ++j)
      for (Eigen::Index a = 0; a < lead; ++a) out(i, j) += rho(a * rest + i, a * rest + j);
  return out;
}

/// Tr_B of an operator on A (x) B with dim B = trail.
inline M trace_last(const M& rho, Eigen::Index trail) {
  const Eigen::Index rest = rho.rows() / trail;
  M out = M::Zero(rest, rest);
  for (Eigen::Index i = 0; i < rest; ++i)
    for (Eigen::Index j = 0; j < rest; ++j)
      for (Eigen::Index b = 0; b < trail; ++b) out(i, j) += rho(i * trail + b, j * trail + b);
  return out;
}

/// Sum of |eigenvalues| of a Hermitian matrix.
inline double trace_norm_hermitian(const M& a) {
  Eigen::SelfAdjointEigenSolver<M> es(0.5 * (a + a.adjoint()));
  return es.eigenvalues().cwiseAbs().sum();
}

/// Normalized Choi state of rho -> sum_k K_k rho K_k^dagger, input copy first.
inline M choi_of_kraus(const std::vector<M>& kraus) {
  const Eigen::Index d = kraus.front().cols();
  const Eigen::Index dout = kraus.front().rows();
  M out = M::Zero(d * dout, d * dout);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) {
      M eab = M::Zero(d, d);
      eab(a, b) = 1.0;
      M img = M::Zero(dout, dout);
      for (const auto& k : kraus) img += k * eab * k.adjoint();
      out += kron(eab, img);
    }
  return out / static_cast<double>(d);
}

inline double choi_distance_unitaries(const M& u1, const M& u2) {
  return 0.5 * trace_norm_hermitian(choi_of_kraus({u1}) - choi_of_kraus({u2}));
}

inline double max_abs(const M& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace oracle
