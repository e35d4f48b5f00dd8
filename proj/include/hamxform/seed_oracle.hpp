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

// Black-box access to e^{-iH tau}, tau > 0.
//
// The hidden Hamiltonian is private. Only `WhiteBox` (whitebox.hpp, for
// reference computations and tests) can read it; the simulation engine does
// not include that header.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hamxform/linalg.hpp"
#include "hamxform/pauli.hpp"
#include "hamxform/rng.hpp"

namespace hamxform {

/// Query count and total evolution time, summed with Neumaier compensation.
class Ledger {
 public:
  std::uint64_t queries() const { return queries_; }
  double evolution_time() const { return sum_ + compensation_; }

  void charge(std::uint64_t count, double tau) {
    queries_ += count;
    add_time(static_cast<double>(count) * tau);
  }

  void merge(const Ledger& other) {
    queries_ += other.queries_;
    add_time(other.sum_);
    add_time(other.compensation_);
  }

  /// Ledger activity since `before`.
  Ledger since(const Ledger& before) const {
    Ledger d;
    d.queries_ = queries_ - before.queries_;
    d.sum_ = evolution_time() - before.evolution_time();
    return d;
  }

 private:
  void add_time(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  std::uint64_t queries_ = 0;
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline void to_json(nlohmann::json& j, const Ledger& l) {
  j = {{"queries", l.queries()}, {"evolution_time", l.evolution_time()}};
}

/// Where the oracle's system sits inside a larger register:
/// dims are (leading) x (system) x (trailing).
struct SubsystemLayout {
  Eigen::Index leading_dim = 1;
  Eigen::Index trailing_dim = 1;
};

class SeedOracle {
 public:
  static constexpr double kRangeSlack = 1e-9;

  /// `delta_h` must bound the spectral range of `h`; checked here.
  SeedOracle(PauliSum h, double delta_h) : hamiltonian_(std::move(h)), delta_h_(delta_h) {
    if (!std::isfinite(delta_h) || delta_h < 0.0) {
      throw std::invalid_argument("SeedOracle: delta_H must be finite and non-negative");
    }
    const double range = spectral_range(reconstruct(hamiltonian_));
    if (delta_h + kRangeSlack < range) {
      throw std::invalid_argument("SeedOracle: delta_H = " + std::to_string(delta_h) +
                                  " is below the spectral range " + std::to_string(range));
    }
  }

  /// Oracle whose delta_H is the exact spectral range.
  static SeedOracle with_exact_range(PauliSum h) {
    const double range = spectral_range(reconstruct(h));
    return SeedOracle(std::move(h), range);
  }

  std::size_t num_qubits() const { return hamiltonian_.num_qubits(); }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(hamiltonian_.dim()); }
  double delta_h() const { return delta_h_; }
  const Ledger& ledger() const { return ledger_; }
  void reset_ledger() { ledger_ = Ledger{}; }
  /// Adds queries made by a copy of this oracle (e.g. a worker thread).
  void absorb_ledger(const Ledger& other) { ledger_.merge(other); }

  /// Applies e^{-iH tau} to the system factor of a pure state.
  void evolve(std::span<Complex> psi, double tau, SubsystemLayout layout = {}) {
    const ComplexMatrix& u = unitary(tau);
    const Eigen::Index d = dim();
    const Eigen::Index lead = layout.leading_dim;
    const Eigen::Index trail = layout.trailing_dim;
    if (static_cast<Eigen::Index>(psi.size()) != lead * d * trail) {
      throw std::invalid_argument("SeedOracle::evolve: state dimension does not match layout");
    }
    scratch_.resize(d);
    const Complex* ud = u.data();  // column-major
    for (Eigen::Index a = 0; a < lead; ++a) {
      for (Eigen::Index r = 0; r < trail; ++r) {
        Complex* base = psi.data() + a * d * trail + r;
        scratch_.setZero();
        for (Eigen::Index k = 0; k < d; ++k) {
          const Complex xk = base[k * trail];
          const Complex* col = ud + k * d;
          for (Eigen::Index s = 0; s < d; ++s) {
            scratch_[s] += cmul(col[s], xk);
          }
        }
        for (Eigen::Index s = 0; s < d; ++s) {
          base[s * trail] = scratch_[s];
        }
      }
    }
    ledger_.charge(1, tau);
  }

  /// `evolve` for a contiguous [lead][system] state with system dimension D
  /// fixed at compile time.
  template <int D>
  void evolve_fixed(Complex* psi, double tau, Eigen::Index lead) {
    const ComplexMatrix& u = unitary(tau);
    if (u.rows() != D) {
      throw std::invalid_argument("SeedOracle::evolve_fixed: system dimension mismatch");
    }
    const Complex* ud = u.data();  // column-major
    for (Eigen::Index a = 0; a < lead; ++a) {
      Complex* x = psi + a * D;
      Complex y[D] = {};
      for (int k = 0; k < D; ++k) {
        for (int s = 0; s < D; ++s) {
          y[s] += cmul(ud[k * D + s], x[k]);
        }
      }
      std::copy(y, y + D, x);
    }
    ledger_.charge(1, tau);
  }

  void evolve(ComplexVector& psi, double tau, SubsystemLayout layout = {}) {
    evolve(std::span<Complex>(psi.data(), static_cast<std::size_t>(psi.size())), tau, layout);
  }

  /// Applies e^{-iH tau} to the system factor of a density matrix.
  void evolve(ComplexMatrix& rho, double tau, SubsystemLayout layout = {}) {
    const ComplexMatrix full = embedded(unitary(tau), layout);
    if (rho.rows() != full.rows() || rho.cols() != full.cols()) {
      throw std::invalid_argument("SeedOracle::evolve: density matrix dimension does not match layout");
    }
    rho = full * rho * full.adjoint();
    ledger_.charge(1, tau);
  }

  /// Superoperator of one query embedded in `layout`. The ledger is charged
  /// `uses` queries of duration tau, one per time the caller consumes it.
  ChannelMatrix evolution_channel(double tau, SubsystemLayout layout, std::uint64_t uses) {
    ChannelMatrix ch = unitary_channel(embedded(unitary(tau), layout));
    ledger_.charge(uses, tau);
    return ch;
  }

 private:
  friend struct WhiteBox;

  const ComplexMatrix& unitary(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
      throw std::domain_error("negative evolution time not available from black box (tau = " +
                              std::to_string(tau) + ")");
    }
    if (!cache_ || cache_->first != tau) {
      cache_.emplace(tau, expm_hermitian(reconstruct(hamiltonian_), tau));
    }
    return cache_->second;
  }

  static ComplexMatrix embedded(const ComplexMatrix& u, SubsystemLayout layout) {
    ComplexMatrix full = u;
    if (layout.trailing_dim > 1) {
      full = kron(full, ComplexMatrix::Identity(layout.trailing_dim, layout.trailing_dim));
    }
    if (layout.leading_dim > 1) {
      full = kron(ComplexMatrix::Identity(layout.leading_dim, layout.leading_dim), full);
    }
    return full;
  }

  PauliSum hamiltonian_;
  double delta_h_;
  Ledger ledger_;
  std::optional<std::pair<double, ComplexMatrix>> cache_;
  ComplexVector scratch_;
};

/// Random Hamiltonian on words of weight <= k, coefficients uniform in
/// [-bound, bound]; delta_H is the exact spectral range.
inline SeedOracle make_random_klocal(std::size_t n, std::size_t k, double bound, Rng& rng) {
  if (n == 0 || k < 1 || k > n) {
    throw std::invalid_argument("make_random_klocal: need 1 <= k <= n");
  }
  if (bound < 0.0) {
    throw std::invalid_argument("make_random_klocal: coefficient bound must be non-negative");
  }
  PauliSum h(n);
  std::uniform_real_distribution<double> coeff(-bound, bound);
  for (const auto& v : all_words(n)) {
    if (v.weight() <= k && bound > 0.0) {
      h.add(v, coeff(rng));
    }
  }
  return SeedOracle::with_exact_range(std::move(h));
}

}  // namespace hamxform
