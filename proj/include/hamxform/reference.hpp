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

// Exact white-box references for checking the engine. Not used by it.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "hamxform/classt.hpp"
#include "hamxform/engine.hpp"
#include "hamxform/linalg.hpp"
#include "hamxform/pauli.hpp"
#include "hamxform/transfer_map.hpp"
#include "hamxform/whitebox.hpp"

namespace hamxform {

/// e^{-i f(H) t}.
inline ComplexMatrix exact_transformed_evolution(const PauliSum& h, const TransferMap& f, double t) {
  if (h.num_qubits() != f.num_qubits()) {
    throw std::invalid_argument("exact_transformed_evolution: qubit count mismatch");
  }
  return expm_hermitian(reconstruct(f.apply(h)), t);
}

/// Unitary channel of e^{-i f(H) t} for the Hamiltonian hidden in `oracle`.
inline ChannelMatrix exact_target_channel(const SeedOracle& oracle, const TransferMap& f, double t) {
  return unitary_channel(exact_transformed_evolution(WhiteBox::hamiltonian(oracle), f, t));
}

/// M - (tr M / d) I.
inline ComplexMatrix strip_identity(const ComplexMatrix& m) {
  const Eigen::Index d = m.rows();
  return m - (m.trace() / static_cast<double>(d)) * ComplexMatrix::Identity(d, d);
}

/// diag(a, b) on ancilla (x) system.
inline ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

/// sum_j h_j V_j (I (x) H) V_j^dagger by full enumeration.
inline ComplexMatrix g_total_bruteforce(const PauliSum& h, const TransferMap& f,
                                        std::uint64_t enumeration_budget = 10'000'000) {
  if (h.num_qubits() != f.num_qubits()) {
    throw std::invalid_argument("g_total_bruteforce: qubit count mismatch");
  }
  const ClassTMap g = classt_totals(f, enumeration_budget);
  return classt_apply(g, kron(ComplexMatrix::Identity(2, 2), reconstruct(h)));
}

/// diag(f(H), -f(H)), the traceless target of g_total(I (x) H).
inline ComplexMatrix g_total_target(const PauliSum& h, const TransferMap& f) {
  const ComplexMatrix fh = reconstruct(f.apply(h));
  return block_diag(fh, -fh);
}

/// The k-th stage map of the controllization chain, k = 1..7, acting on a
/// 2^{n+1}-dimensional operator. Stages 3, 5 and 7 use u, w and s_f.
inline ComplexMatrix process_stage(int k, const ComplexMatrix& m, std::size_t n, const PauliIndexVector& u,
                                   const PauliIndexVector& w, int s_f) {
  const Eigen::Index dd = Eigen::Index{2} << n;
  if (m.rows() != dd || m.cols() != dd) {
    throw std::invalid_argument("process_stage: operator must be 2^(n+1) dimensional");
  }
  auto conj = [&](const GateLayer& layer) {
    const ComplexMatrix g = GateSequence::layer_matrix(n, layer);
    return ComplexMatrix(g * m * g.adjoint());
  };
  auto twirl = [&](auto make_layer) {
    ComplexMatrix acc = ComplexMatrix::Zero(dd, dd);
    for (const auto& v : all_words(n)) {
      const ComplexMatrix g = GateSequence::layer_matrix(n, make_layer(v));
      acc += g * m * g.adjoint();
    }
    return ComplexMatrix(acc / static_cast<double>(num_words(n)));
  };
  switch (k) {
    case 1:
      return twirl([](const PauliIndexVector& v) { return GateLayer{ControlledPauli{v}}; });
    case 2:
      return 2.0 * conj(AncillaHadamard{});
    case 3:
      return conj(ControlledPauli{u});
    case 4:
      return twirl([](const PauliIndexVector& v) { return GateLayer{SystemPauli{v}}; });
    case 5:
      return conj(ControlledPauli{w});
    case 6:
      return conj(AncillaHadamard{});
    case 7:
      return conj(AncillaXPower{s_f});
    default:
      throw std::invalid_argument("process_stage: stage must be in 1..7, got " + std::to_string(k));
  }
}

/// Stages 1..7 applied in order to `m`.
inline ComplexMatrix process_chain(const ComplexMatrix& m, std::size_t n, const PauliIndexVector& u,
                                   const PauliIndexVector& w, int s_f) {
  ComplexMatrix x = m;
  for (int k = 1; k <= 7; ++k) {
    x = process_stage(k, x, n, u, w, s_f);
  }
  return x;
}

}  // namespace hamxform
