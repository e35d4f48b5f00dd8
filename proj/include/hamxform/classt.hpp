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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hamxform/linalg.hpp"

namespace hamxform {

/// Weighted conjugation map g(H) = sum_j h_j U_j H U_j^dagger, h_j > 0.
class ClassTMap {
 public:
  struct Element {
    double weight;
    ComplexMatrix unitary;
  };

  static constexpr double kUnitaryTolerance = 1e-10;

  ClassTMap() = default;

  explicit ClassTMap(std::vector<Element> elements) : elements_(std::move(elements)) {
    for (const auto& e : elements_) {
      validate(e);
    }
  }

  void push_back(Element e) {
    validate(e);
    elements_.push_back(std::move(e));
  }

  const std::vector<Element>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  Eigen::Index dim() const { return elements_.empty() ? 0 : elements_.front().unitary.rows(); }

  /// lambda = sum_j h_j.
  double total_weight() const {
    double s = 0.0;
    for (const auto& e : elements_) {
      s += e.weight;
    }
    return s;
  }

  /// p_j = h_j / lambda.
  std::vector<double> probabilities() const {
    const double lambda = total_weight();
    std::vector<double> p;
    p.reserve(elements_.size());
    for (const auto& e : elements_) {
      p.push_back(e.weight / lambda);
    }
    return p;
  }

 private:
  void validate(const Element& e) const {
    if (!(e.weight > 0.0)) {
      throw std::invalid_argument("ClassTMap: weights must be positive");
    }
    if (e.unitary.rows() != e.unitary.cols()) {
      throw std::invalid_argument("ClassTMap: unitary is not square");
    }
    if (!elements_.empty() && e.unitary.rows() != elements_.front().unitary.rows()) {
      throw std::invalid_argument("ClassTMap: dimension mismatch between elements");
    }
    if (unitarity_defect(e.unitary) > kUnitaryTolerance) {
      throw std::invalid_argument("ClassTMap: element is not unitary");
    }
  }

  std::vector<Element> elements_;
};

inline ComplexMatrix classt_apply(const ClassTMap& g, const ComplexMatrix& h) {
  if (g.empty()) {
    throw std::invalid_argument("classt_apply: empty map");
  }
  if (h.rows() != g.dim() || h.cols() != g.dim()) {
    throw std::invalid_argument("classt_apply: dimension mismatch");
  }
  ComplexMatrix acc = ComplexMatrix::Zero(h.rows(), h.cols());
  for (const auto& e : g.elements()) {
    acc.noalias() += e.weight * (e.unitary * h * e.unitary.adjoint());
  }
  return acc;
}

/// g2 after g1: weights multiply, unitaries compose as U2 U1.
inline ClassTMap classt_compose(const ClassTMap& g2, const ClassTMap& g1, std::uint64_t budget = 10'000'000) {
  if (g2.dim() != g1.dim()) {
    throw std::invalid_argument("classt_compose: dimension mismatch");
  }
  if (static_cast<double>(g2.size()) * static_cast<double>(g1.size()) > static_cast<double>(budget)) {
    throw std::length_error("classt_compose: product size exceeds budget of " + std::to_string(budget));
  }
  std::vector<ClassTMap::Element> out;
  out.reserve(g2.size() * g1.size());
  for (const auto& a : g2.elements()) {
    for (const auto& b : g1.elements()) {
      out.push_back({a.weight * b.weight, a.unitary * b.unitary});
    }
  }
  return ClassTMap(std::move(out));
}

/// The unitary-channel mixture {(p_j, U_j . U_j^dagger)} of a Class-T map.
inline ChannelMixture classt_unitary_mixture(const ClassTMap& g) {
  ChannelMixture mix;
  const auto p = g.probabilities();
  for (std::size_t j = 0; j < g.size(); ++j) {
    mix.emplace_back(p[j], unitary_channel(g.elements()[j].unitary));
  }
  return mix;
}

}  // namespace hamxform
