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

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hamxform/pauli.hpp"
#include "hamxform/rng.hpp"

namespace hamxform {

/// One Pauli transfer element: sigma_u contributes gamma * sigma_w.
struct TransferEntry {
  PauliIndexVector w;
  PauliIndexVector u;
  double gamma = 0.0;
};

/// A sampled (u, w) pair and its sign gate exponent.
struct TransferSample {
  std::size_t entry = 0;
  PauliIndexVector u;
  PauliIndexVector w;
  int s_f = 0;
};

/// Sparse real Pauli transfer matrix of a Hermitian-preserving map f with
/// f(I) = 0. Entries are kept sorted by (w, u).
class TransferMap {
 public:
  static constexpr double kMinMagnitude = 1e-15;

  TransferMap(std::size_t n, const std::vector<TransferEntry>& entries) : n_(n) {
    if (n == 0) {
      throw std::invalid_argument("TransferMap: qubit count must be at least 1");
    }
    std::map<std::pair<PauliIndexVector, PauliIndexVector>, double> merged;
    for (const auto& e : entries) {
      if (e.w.size() != n || e.u.size() != n) {
        throw std::invalid_argument("TransferMap: entry length does not match n = " + std::to_string(n));
      }
      if (e.u.is_identity()) {
        throw std::invalid_argument("TransferMap: u = (0,...,0) is not allowed (f(I) must vanish)");
      }
      if (!std::isfinite(e.gamma)) {
        throw std::invalid_argument("TransferMap: non-finite gamma");
      }
      if (std::abs(e.gamma) < kMinMagnitude) {
        throw std::invalid_argument("TransferMap: |gamma| below 1e-15 for (" + e.w.str() + ", " + e.u.str() + ")");
      }
      auto [it, inserted] = merged.emplace(std::make_pair(e.w, e.u), e.gamma);
      if (!inserted) {
        throw std::invalid_argument("TransferMap: duplicate entry (" + e.w.str() + ", " + e.u.str() + ")");
      }
    }
    if (merged.empty()) {
      throw std::invalid_argument("TransferMap: at least one entry is required");
    }
    double abs_sum = 0.0;
    for (const auto& [key, g] : merged) {
      entries_.push_back({key.first, key.second, g});
      abs_sum += std::abs(g);
    }
    beta_ = 2.0 * abs_sum;
    cumulative_.reserve(entries_.size());
    double acc = 0.0;
    for (const auto& e : entries_) {
      acc += std::abs(e.gamma);
      cumulative_.push_back(acc / abs_sum);
    }
    cumulative_.back() = 1.0;
  }

  std::size_t num_qubits() const { return n_; }
  const std::vector<TransferEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double beta() const { return beta_; }

  /// p^(2) of entry i: 2 |gamma_i| / beta.
  double probability(std::size_t i) const { return 2.0 * std::abs(entries_.at(i).gamma) / beta_; }

  static int sign_exponent(double gamma) { return gamma > 0.0 ? 0 : 1; }

  /// Draw (u, w) with probability 2|gamma|/beta by inverse CDF.
  TransferSample sample(Rng& rng) const {
    const std::size_t idx = sample_index(rng);
    const auto& e = entries_[idx];
    return {idx, e.u, e.w, sign_exponent(e.gamma)};
  }

  /// Index-only draw; consumes the same randomness as `sample`.
  std::size_t sample_index(Rng& rng) const {
    if (entries_.size() == 1) {
      return 0;
    }
    const double r = uniform01(rng);
    const auto idx =
        static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), r) - cumulative_.begin());
    return std::min(idx, entries_.size() - 1);
  }

  /// f(H) = sum_{(w,u)} gamma_{w,u} c_u sigma_w.
  PauliSum apply(const PauliSum& h) const {
    if (h.num_qubits() != n_) {
      throw std::invalid_argument("TransferMap::apply: qubit count mismatch");
    }
    PauliSum out(n_);
    for (const auto& e : entries_) {
      const double c = h.coefficient(e.u);
      if (c != 0.0) {
        out.add(e.w, e.gamma * c);
      }
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<TransferEntry> entries_;
  std::vector<double> cumulative_;
  double beta_ = 0.0;
};

inline TransferSample sample_uw(const TransferMap& f, Rng& rng) { return f.sample(rng); }

inline PauliSum apply(const TransferMap& f, const PauliSum& h) { return f.apply(h); }

namespace detail {

inline std::vector<PauliIndexVector> support_or_all(std::size_t n, const std::optional<std::vector<PauliIndexVector>>& j) {
  std::vector<PauliIndexVector> out;
  if (j) {
    std::set<PauliIndexVector> seen;
    for (const auto& u : *j) {
      if (u.size() != n) {
        throw std::invalid_argument("support set word " + u.str() + " has wrong length");
      }
      if (u.is_identity()) {
        throw std::invalid_argument("support set must not contain the all-zero word");
      }
      if (seen.insert(u).second) {
        out.push_back(u);
      }
    }
    if (out.empty()) {
      throw std::invalid_argument("support set is empty");
    }
  } else {
    for (std::uint64_t i = 1; i < num_words(n); ++i) {
      out.push_back(PauliIndexVector::from_index(n, i));
    }
  }
  return out;
}

}  // namespace detail

/// gamma_{w,u} = -delta_{w,u} over J (all non-identity words by default).
inline TransferMap build_negation(std::size_t n, const std::optional<std::vector<PauliIndexVector>>& support = {}) {
  std::vector<TransferEntry> entries;
  for (const auto& u : detail::support_or_all(n, support)) {
    entries.push_back({u, u, -1.0});
  }
  return TransferMap(n, entries);
}

/// gamma_{w,u} = (-1)^{y_weight(w)} delta_{w,u}: H -> H^T on the traceless part.
inline TransferMap build_transpose(std::size_t n, const std::optional<std::vector<PauliIndexVector>>& support = {}) {
  std::vector<TransferEntry> entries;
  for (const auto& u : detail::support_or_all(n, support)) {
    entries.push_back({u, u, (y_weight(u) % 2 == 0) ? 1.0 : -1.0});
  }
  return TransferMap(n, entries);
}

/// gamma_{w,u} = delta_{w,(2,0,...,0)} delta_{u,v}: H -> c_v Y (x) I (x) ... (x) I.
inline TransferMap build_filter(std::size_t n, const PauliIndexVector& v) {
  if (v.size() != n) {
    throw std::invalid_argument("build_filter: word length does not match n");
  }
  if (v.is_identity()) {
    throw std::invalid_argument("build_filter: v must not be the all-zero word");
  }
  std::vector<std::uint8_t> y(n, 0);
  y[0] = 2;
  return TransferMap(n, {{PauliIndexVector(y), v, 1.0}});
}

inline void to_json(nlohmann::json& j, const TransferMap& f) {
  j = nlohmann::json::object();
  j["n"] = f.num_qubits();
  auto entries = nlohmann::json::array();
  for (const auto& e : f.entries()) {
    entries.push_back({{"w", e.w}, {"u", e.u}, {"gamma", e.gamma}});
  }
  j["entries"] = std::move(entries);
}

inline TransferMap transfer_map_from_json(const nlohmann::json& j) {
  const auto n = j.at("n").get<std::size_t>();
  std::vector<TransferEntry> entries;
  for (const auto& e : j.at("entries")) {
    const auto& g = e.at("gamma");
    if (!g.is_number()) {
      throw std::invalid_argument("TransferMap JSON: gamma must be a real number");
    }
    entries.push_back({e.at("w").get<PauliIndexVector>(), e.at("u").get<PauliIndexVector>(), g.get<double>()});
  }
  return TransferMap(n, entries);
}

}  // namespace hamxform
