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

#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace hamxform {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Largest |M - M^dagger| entry. Zero for exactly Hermitian input.
/// Plain complex product, skipping the inf/nan recovery of operator*.
inline Complex cmul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline double hermitian_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("hermitian_defect: matrix is not square");
  }
  if (m.size() == 0) {
    return 0.0;
  }
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// A Pauli word sigma_{v_1} x ... x sigma_{v_n}, entries 0=I, 1=X, 2=Y, 3=Z.
///
/// Qubit 1 is the most significant tensor factor, so `index()` reads the
/// entries as base-4 digits with v_1 leading.
class PauliIndexVector {
 public:
  PauliIndexVector() = default;

  explicit PauliIndexVector(std::vector<std::uint8_t> entries) : entries_(std::move(entries)) {
    validate();
  }

  PauliIndexVector(std::initializer_list<int> entries) {
    entries_.reserve(entries.size());
    for (int e : entries) {
      if (e < 0 || e > 3) {
        throw std::invalid_argument("PauliIndexVector: entry " + std::to_string(e) + " outside {0,1,2,3}");
      }
      entries_.push_back(static_cast<std::uint8_t>(e));
    }
    validate();
  }

  static PauliIndexVector identity(std::size_t n) {
    return PauliIndexVector(std::vector<std::uint8_t>(n, 0));
  }

  static PauliIndexVector from_index(std::size_t n, std::uint64_t index) {
    std::vector<std::uint8_t> e(n, 0);
    for (std::size_t q = n; q-- > 0;) {
      e[q] = static_cast<std::uint8_t>(index & 3u);
      index >>= 2;
    }
    if (index != 0) {
      throw std::invalid_argument("PauliIndexVector::from_index: index out of range");
    }
    return PauliIndexVector(std::move(e));
  }

  static PauliIndexVector from_ints(const std::vector<int>& entries) {
    std::vector<std::uint8_t> e;
    e.reserve(entries.size());
    for (int x : entries) {
      if (x < 0 || x > 3) {
        throw std::invalid_argument("PauliIndexVector: entry " + std::to_string(x) + " outside {0,1,2,3}");
      }
      e.push_back(static_cast<std::uint8_t>(x));
    }
    return PauliIndexVector(std::move(e));
  }

  std::size_t size() const { return entries_.size(); }
  std::uint8_t operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<std::uint8_t>& entries() const { return entries_; }

  std::uint64_t index() const {
    std::uint64_t r = 0;
    for (auto e : entries_) {
      r = (r << 2) | e;
    }
    return r;
  }

  bool is_identity() const {
    for (auto e : entries_) {
      if (e != 0) {
        return false;
      }
    }
    return true;
  }

  std::size_t weight() const {
    std::size_t w = 0;
    for (auto e : entries_) {
      w += e != 0;
    }
    return w;
  }

  std::string str() const {
    static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
    std::string s;
    for (auto e : entries_) {
      s.push_back(kLetters[e]);
    }
    return s;
  }

  auto operator<=>(const PauliIndexVector&) const = default;
  bool operator==(const PauliIndexVector&) const = default;

 private:
  void validate() const {
    if (entries_.empty()) {
      throw std::invalid_argument("PauliIndexVector: length must be at least 1");
    }
    for (auto e : entries_) {
      if (e > 3) {
        throw std::invalid_argument("PauliIndexVector: entry outside {0,1,2,3}");
      }
    }
  }

  std::vector<std::uint8_t> entries_;
};

inline void to_json(nlohmann::json& j, const PauliIndexVector& v) {
  j = nlohmann::json::array();
  for (auto e : v.entries()) {
    j.push_back(static_cast<int>(e));
  }
}

inline void from_json(const nlohmann::json& j, PauliIndexVector& v) {
  v = PauliIndexVector::from_ints(j.get<std::vector<int>>());
}

/// Number of Y factors in `w`.
inline std::size_t y_weight(const PauliIndexVector& w) {
  std::size_t c = 0;
  for (auto e : w.entries()) {
    c += e == 2;
  }
  return c;
}

inline std::uint64_t num_words(std::size_t n) { return std::uint64_t{1} << (2 * n); }

/// All 4^n Pauli words in lexicographic (base-4 index) order.
inline std::vector<PauliIndexVector> all_words(std::size_t n) {
  std::vector<PauliIndexVector> out;
  const auto count = num_words(n);
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    out.push_back(PauliIndexVector::from_index(n, i));
  }
  return out;
}

inline ComplexMatrix single_qubit_pauli(int k) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (k) {
    case 0:
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case 1:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case 2:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case 3:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    default:
      throw std::invalid_argument("single_qubit_pauli: index outside {0,1,2,3}");
  }
  return m;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Dense sigma_{v_1} x ... x sigma_{v_n}.
inline ComplexMatrix pauli_matrix(const PauliIndexVector& v) {
  ComplexMatrix m = single_qubit_pauli(v[0]);
  for (std::size_t q = 1; q < v.size(); ++q) {
    m = kron(m, single_qubit_pauli(v[q]));
  }
  return m;
}

/// Monomial form of a Pauli word: sigma_v |s> = phase[s] |s ^ flip>.
///
/// Used for in-place application to state vectors; equal to `pauli_matrix`
/// column by column.
struct PauliAction {
  std::uint64_t flip = 0;
  std::vector<Complex> phase;

  explicit PauliAction(const PauliIndexVector& v) {
    const std::size_t n = v.size();
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::uint64_t sign_mask = 0;
    std::size_t ys = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
      const auto e = v[q];
      if (e == 1 || e == 2) {
        flip |= bit;
      }
      if (e == 2 || e == 3) {
        sign_mask |= bit;
      }
      ys += e == 2;
    }
    // Y|b> = i (-1)^b |1-b>, Z|b> = (-1)^b |b>.
    static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex base = kIPow[ys % 4];
    phase.resize(dim);
    for (std::uint64_t s = 0; s < dim; ++s) {
      phase[s] = (std::popcount(s & sign_mask) & 1) ? -base : base;
    }
  }

  std::size_t dim() const { return phase.size(); }
};

/// A Hermitian operator as a real combination of Pauli words.
class PauliSum {
 public:
  using Terms = std::map<PauliIndexVector, double>;

  explicit PauliSum(std::size_t n = 1) : n_(n) {
    if (n == 0) {
      throw std::invalid_argument("PauliSum: qubit count must be at least 1");
    }
  }

  PauliSum(std::size_t n, std::initializer_list<std::pair<PauliIndexVector, double>> terms) : PauliSum(n) {
    for (const auto& [v, c] : terms) {
      add(v, c);
    }
  }

  std::size_t num_qubits() const { return n_; }
  std::uint64_t dim() const { return std::uint64_t{1} << n_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double coefficient(const PauliIndexVector& v) const {
    auto it = terms_.find(v);
    return it == terms_.end() ? 0.0 : it->second;
  }

  PauliSum& add(const PauliIndexVector& v, double c) {
    if (v.size() != n_) {
      throw std::invalid_argument("PauliSum::add: word " + v.str() + " has length " + std::to_string(v.size()) +
                                  ", expected " + std::to_string(n_));
    }
    if (!std::isfinite(c)) {
      throw std::invalid_argument("PauliSum::add: non-finite coefficient for " + v.str());
    }
    if (c == 0.0) {
      return *this;
    }
    auto [it, inserted] = terms_.emplace(v, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) {
        terms_.erase(it);
      }
    }
    return *this;
  }

  /// H_0: the same sum without the identity word.
  PauliSum traceless() const {
    PauliSum out = *this;
    out.terms_.erase(PauliIndexVector::identity(n_));
    return out;
  }

  PauliSum scaled(double a) const {
    PauliSum out(n_);
    for (const auto& [v, c] : terms_) {
      out.add(v, a * c);
    }
    return out;
  }

  friend PauliSum operator+(const PauliSum& a, const PauliSum& b) {
    if (a.n_ != b.n_) {
      throw std::invalid_argument("PauliSum: qubit count mismatch in addition");
    }
    PauliSum out = a;
    for (const auto& [v, c] : b.terms_) {
      out.add(v, c);
    }
    return out;
  }

  friend PauliSum operator*(double a, const PauliSum& h) { return h.scaled(a); }

  double l1_norm() const {
    double s = 0.0;
    for (const auto& [v, c] : terms_) {
      s += std::abs(c);
    }
    return s;
  }

 private:
  std::size_t n_;
  Terms terms_;
};

inline ComplexMatrix reconstruct(const PauliSum& h) {
  const auto d = static_cast<Eigen::Index>(h.dim());
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (const auto& [v, c] : h.terms()) {
    PauliAction act(v);
    for (Eigen::Index s = 0; s < d; ++s) {
      m(static_cast<Eigen::Index>(static_cast<std::uint64_t>(s) ^ act.flip), s) += c * act.phase[s];
    }
  }
  return m;
}

inline constexpr double kHermitianTolerance = 1e-10;

/// c_v = tr(sigma_v H) / 2^n for every word; rejects non-Hermitian input.
inline PauliSum decompose(const ComplexMatrix& h) {
  const auto d = h.rows();
  if (d != h.cols() || d < 2 || (d & (d - 1)) != 0) {
    throw std::invalid_argument("decompose: matrix must be square with dimension 2^n, n >= 1");
  }
  const double defect = hermitian_defect(h);
  if (defect > kHermitianTolerance) {
    std::ostringstream os;
    os << "decompose: matrix is not Hermitian (max |H - H^dagger| entry = " << defect << ")";
    throw std::invalid_argument(os.str());
  }
  const auto n = static_cast<std::size_t>(std::countr_zero(static_cast<std::uint64_t>(d)));
  PauliSum out(n);
  const auto count = num_words(n);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto v = PauliIndexVector::from_index(n, i);
    PauliAction act(v);
    // tr(sigma_v H) = sum_s phase[s] H(s, s ^ flip)
    Complex tr = 0.0;
    for (Eigen::Index s = 0; s < d; ++s) {
      tr += act.phase[s] * h(s, static_cast<Eigen::Index>(static_cast<std::uint64_t>(s) ^ act.flip));
    }
    const Complex c = tr / static_cast<double>(d);
    if (std::abs(c.imag()) > kHermitianTolerance) {
      std::ostringstream os;
      os << "decompose: coefficient of " << v.str() << " has imaginary part " << c.imag();
      throw std::invalid_argument(os.str());
    }
    if (std::abs(c.real()) > 1e-14) {
      out.add(v, c.real());
    }
  }
  return out;
}

/// (1/4^n) sum_u sigma_u M sigma_u evaluated term by term.
inline ComplexMatrix pauli_twirl(const ComplexMatrix& m) {
  const auto d = m.rows();
  if (d != m.cols() || d < 2 || (d & (d - 1)) != 0) {
    throw std::invalid_argument("pauli_twirl: matrix must be square with dimension 2^n");
  }
  const auto n = static_cast<std::size_t>(std::countr_zero(static_cast<std::uint64_t>(d)));
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  for (const auto& u : all_words(n)) {
    const ComplexMatrix s = pauli_matrix(u);
    acc += s * m * s;
  }
  return acc / static_cast<double>(num_words(n));
}

inline void to_json(nlohmann::json& j, const PauliSum& h) {
  j = nlohmann::json::object();
  j["n"] = h.num_qubits();
  auto terms = nlohmann::json::array();
  for (const auto& [v, c] : h.terms()) {
    terms.push_back({{"v", v}, {"c", c}});
  }
  j["terms"] = std::move(terms);
}

inline void from_json(const nlohmann::json& j, PauliSum& h) {
  const auto n = j.at("n").get<std::size_t>();
  PauliSum out(n);
  for (const auto& t : j.at("terms")) {
    out.add(t.at("v").get<PauliIndexVector>(), t.at("c").get<double>());
  }
  h = std::move(out);
}

}  // namespace hamxform
