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

// Block Hamiltonians H(A) = [[D0, A^dagger], [A, D1]] (first qubit selects
// the block) and forward-only simulation of e^{+-i H'(A) t}, where
// H'(A) = [[0, A^dagger], [A, 0]].

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamxform/classt.hpp"
#include "hamxform/engine.hpp"
#include "hamxform/linalg.hpp"
#include "hamxform/pauli.hpp"
#include "hamxform/transfer_map.hpp"

namespace hamxform {

inline constexpr double kSingularValueSlack = 1e-12;

class BlockHamiltonian {
 public:
  /// Diagonal blocks default to zero.
  BlockHamiltonian(ComplexMatrix a, std::optional<ComplexMatrix> d0 = std::nullopt,
                   std::optional<ComplexMatrix> d1 = std::nullopt)
      : a_(std::move(a)) {
    const Eigen::Index m = a_.rows();
    if (m == 0 || a_.cols() != m || (m & (m - 1)) != 0) {
      throw std::invalid_argument("BlockHamiltonian: A must be square with power-of-two dimension");
    }
    d0_ = d0.value_or(ComplexMatrix::Zero(m, m));
    d1_ = d1.value_or(ComplexMatrix::Zero(m, m));
    for (const auto* d : {&d0_, &d1_}) {
      if (d->rows() != m || d->cols() != m) {
        throw std::invalid_argument("BlockHamiltonian: diagonal block dimension does not match A");
      }
      if (hermitian_defect(*d) > kHermitianTolerance) {
        throw std::invalid_argument("BlockHamiltonian: diagonal blocks must be Hermitian");
      }
    }
    const Eigen::JacobiSVD<ComplexMatrix> svd(a_);
    const auto& sv = svd.singularValues();
    if (sv.maxCoeff() > 1.0 + kSingularValueSlack) {
      throw std::invalid_argument("BlockHamiltonian: singular value " + std::to_string(sv.maxCoeff()) +
                                  " of A exceeds 1");
    }
    lambda_min_ = sv.minCoeff();
    if (!(lambda_min_ > 0.0)) {
      throw std::invalid_argument("BlockHamiltonian: A must be invertible (lambda_min > 0)");
    }
    h_ = ComplexMatrix::Zero(2 * m, 2 * m);
    h_.topLeftCorner(m, m) = d0_;
    h_.topRightCorner(m, m) = a_.adjoint();
    h_.bottomLeftCorner(m, m) = a_;
    h_.bottomRightCorner(m, m) = d1_;
    n_ = static_cast<std::size_t>(std::countr_zero(static_cast<std::uint64_t>(2 * m)));
  }

  std::size_t num_qubits() const { return n_; }
  const ComplexMatrix& a() const { return a_; }
  const ComplexMatrix& d0() const { return d0_; }
  const ComplexMatrix& d1() const { return d1_; }
  const ComplexMatrix& matrix() const { return h_; }
  double lambda_min() const { return lambda_min_; }

  PauliSum pauli() const { return decompose(h_); }

  /// H'(A): the off-diagonal part.
  ComplexMatrix hprime() const {
    const Eigen::Index m = a_.rows();
    ComplexMatrix out = ComplexMatrix::Zero(2 * m, 2 * m);
    out.topRightCorner(m, m) = a_.adjoint();
    out.bottomLeftCorner(m, m) = a_;
    return out;
  }

 private:
  ComplexMatrix a_;
  ComplexMatrix d0_;
  ComplexMatrix d1_;
  ComplexMatrix h_;
  double lambda_min_ = 0.0;
  std::size_t n_ = 0;
};

namespace detail {

/// Words whose first factor is X or Y: those anticommuting with Z (x) I.
inline std::vector<PauliIndexVector> offdiagonal_words(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("build_hprime_map: n must be at least 1");
  }
  std::vector<PauliIndexVector> out;
  for (const auto& u : all_words(n)) {
    if (u.entries()[0] == 1 || u.entries()[0] == 2) {
      out.push_back(u);
    }
  }
  return out;
}

}  // namespace detail

/// H -> (H - (Z (x) I) H (Z (x) I)) / 2, which sends H(A) to H'(A).
inline TransferMap build_hprime_map(std::size_t n) {
  std::vector<TransferEntry> entries;
  for (const auto& u : detail::offdiagonal_words(n)) {
    entries.push_back({u, u, 1.0});
  }
  return TransferMap(n, entries);
}

/// H -> -H'(A).
inline TransferMap build_neg_hprime_map(std::size_t n) {
  std::vector<TransferEntry> entries;
  for (const auto& u : detail::offdiagonal_words(n)) {
    entries.push_back({u, u, -1.0});
  }
  return TransferMap(n, entries);
}

/// Map whose forward simulation gives e^{sign i H' t}: sign '+' needs -H'.
inline TransferMap hprime_map_for_sign(std::size_t n, char sign) {
  if (sign == '+') {
    return build_neg_hprime_map(n);
  }
  if (sign == '-') {
    return build_hprime_map(n);
  }
  throw std::invalid_argument(std::string("block encoding: sign must be '+' or '-', got '") + sign + "'");
}

/// Composite Class-T map on ancilla (x) system built from the identity and
/// the controllized negation: {(1/2, I)} u {(h_j/2, (I (x) Z (x) I) V_j)}
/// with {(h_j, V_j)} the negation totals. With the ancilla in |0>, it sends
/// H to +-H' on the ancilla-0 block; total weight (beta_neg + 1)/2.
inline ClassTMap hprime_classt_map(std::size_t n, char sign, std::uint64_t enumeration_budget = 10'000'000) {
  if (sign != '+' && sign != '-') {
    throw std::invalid_argument("hprime_classt_map: sign must be '+' or '-'");
  }
  const ClassTMap neg = classt_totals(build_negation(n), enumeration_budget);
  const Eigen::Index dd = Eigen::Index{2} << n;
  std::vector<std::uint8_t> z(n, 0);
  z[0] = 3;
  const ComplexMatrix zi = kron(ComplexMatrix::Identity(2, 2), pauli_matrix(PauliIndexVector(z)));
  std::vector<ClassTMap::Element> out;
  out.reserve(neg.size() + 1);
  if (sign == '+') {
    // +H' = 1/2 [H + Z(-H)Z].
    out.push_back({0.5, ComplexMatrix::Identity(dd, dd)});
    for (const auto& e : neg.elements()) {
      out.push_back({0.5 * e.weight, zi * e.unitary});
    }
  } else {
    // -H' = 1/2 [(-H) + Z H Z].
    for (const auto& e : neg.elements()) {
      out.push_back({0.5 * e.weight, e.unitary});
    }
    out.push_back({0.5, zi});
  }
  return ClassTMap(std::move(out));
}

/// U(A) = i [[sqrt(I - A^dag A), A^dag], [A, -sqrt(I - A A^dag)]].
inline ComplexMatrix exact_u_of_A(const ComplexMatrix& a) {
  const Eigen::Index m = a.rows();
  if (a.cols() != m || m == 0) {
    throw std::invalid_argument("exact_u_of_A: A must be square");
  }
  const Eigen::JacobiSVD<ComplexMatrix> svd(a);
  if (svd.singularValues().maxCoeff() > 1.0 + kSingularValueSlack) {
    throw std::invalid_argument("exact_u_of_A: singular value of A exceeds 1");
  }
  const ComplexMatrix id = ComplexMatrix::Identity(m, m);
  ComplexMatrix u(2 * m, 2 * m);
  u.topLeftCorner(m, m) = psd_sqrt(id - a.adjoint() * a);
  u.topRightCorner(m, m) = a.adjoint();
  u.bottomLeftCorner(m, m) = a;
  u.bottomRightCorner(m, m) = -psd_sqrt(id - a * a.adjoint());
  return kI * u;
}

struct BlockSimulation {
  RunResult run;
  TransferMap map;
  ComplexMatrix target;  // e^{sign i H' t}
};

/// Algorithm 1 on the H(A) oracle with the map for e^{sign i H'(A) t}.
inline BlockSimulation simulate_hprime_evolution(SeedOracle& oracle, char sign, const ComplexVector& psi,
                                                 const RunConfig& config, const BlockHamiltonian& block,
                                                 Eigen::Index ref_dim = 1) {
  if (block.num_qubits() != oracle.num_qubits()) {
    throw std::invalid_argument("simulate_hprime_evolution: block Hamiltonian does not match the oracle");
  }
  TransferMap f = hprime_map_for_sign(oracle.num_qubits(), sign);
  RunResult r = run(oracle, f, psi, config, ref_dim);
  const double s = sign == '+' ? 1.0 : -1.0;
  // e^{s i H' t} = expm_hermitian(H', -s t).
  ComplexMatrix target = expm_hermitian(block.hprime(), -s * config.t);
  return {std::move(r), std::move(f), std::move(target)};
}

/// d(eps) = ceil(C ln(1/eps) / lambda_min).
inline std::uint64_t qsvt_query_budget(double epsilon, double lambda_min, double c = 1.0) {
  if (!(epsilon > 0.0) || !(lambda_min > 0.0) || !(c > 0.0)) {
    throw std::invalid_argument("qsvt_query_budget: inputs must be positive");
  }
  const double v = c * std::log(1.0 / epsilon) / lambda_min;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(v - 1e-12)));
}

/// eps/2 + 2 (eps / 4d) d: the overall error with a per-call budget eps/(4d).
inline double qsvt_error_total(double epsilon, std::uint64_t d) {
  const double dd = static_cast<double>(d);
  return epsilon / 2.0 + 2.0 * (epsilon / (4.0 * dd)) * dd;
}

inline nlohmann::json block_hamiltonian_to_json(const BlockHamiltonian& b) {
  return {{"A", matrix_to_json(b.a())}, {"D0", matrix_to_json(b.d0())}, {"D1", matrix_to_json(b.d1())}};
}

inline BlockHamiltonian block_hamiltonian_from_json(const nlohmann::json& j) {
  std::optional<ComplexMatrix> d0;
  std::optional<ComplexMatrix> d1;
  if (j.contains("D0")) {
    d0 = matrix_from_json(j.at("D0"));
  }
  if (j.contains("D1")) {
    d1 = matrix_from_json(j.at("D1"));
  }
  return BlockHamiltonian(matrix_from_json(j.at("A")), d0, d1);
}

}  // namespace hamxform
