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
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamxform/linalg.hpp"
#include "hamxform/rng.hpp"

namespace hamxform {

/// (2 lambda^2 t^2 / N) e^{2 lambda t / N}.
inline double qdrift_error_bound(double lambda, double t, std::uint64_t n) {
  if (!(lambda > 0.0) || !(t > 0.0) || n == 0) {
    throw std::invalid_argument("qdrift_error_bound: inputs must be positive");
  }
  const double nd = static_cast<double>(n);
  const double x = lambda * t;
  return 2.0 * x * x / nd * std::exp(2.0 * x / nd);
}

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

inline void to_json(nlohmann::json& j, const MeanEstimate& m) {
  j = {{"mean", m.mean}, {"standard_error", m.standard_error}, {"samples", m.samples}};
}

inline constexpr std::size_t kMinVarianceSamples = 30;

inline MeanEstimate mean_and_standard_error(const std::vector<double>& xs) {
  MeanEstimate out;
  out.samples = xs.size();
  if (xs.empty()) {
    return out;
  }
  double sum = 0.0;
  for (double x : xs) {
    sum += x;
  }
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) {
      ss += (x - out.mean) * (x - out.mean);
    }
    const double var = ss / static_cast<double>(xs.size() - 1);
    out.standard_error = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return out;
}

/// Sample mean and standard error of ||exact(psi) - rho_k||_1^2 over the
/// trajectory outputs rho_k. psi lives on system (x) reference.
inline MeanEstimate empirical_variance(const ChannelMatrix& exact, const std::vector<ComplexMatrix>& outputs,
                                       const ComplexVector& psi, Eigen::Index ref_dim = 1) {
  if (outputs.size() < kMinVarianceSamples) {
    throw std::invalid_argument("empirical_variance: need at least 30 trajectories, got " +
                                std::to_string(outputs.size()));
  }
  const ComplexMatrix ideal = exact.apply_with_reference(psi * psi.adjoint(), ref_dim);
  std::vector<double> sq;
  sq.reserve(outputs.size());
  for (const auto& rho : outputs) {
    if (rho.rows() != ideal.rows() || rho.cols() != ideal.cols()) {
      throw std::invalid_argument("empirical_variance: trajectory output dimension mismatch");
    }
    const double d = trace_norm(ideal - rho);
    sq.push_back(d * d);
  }
  return mean_and_standard_error(sq);
}

struct Theorem2Report {
  double delta_pure = 0.0;    // max sampled ||U(psi) - sum_j p_j F_j(psi)||_1
  double variance_sup = 0.0;  // max sampled sum_j p_j ||U(psi) - F_j(psi)||_1^2
  std::size_t states = 0;
  std::size_t violations = 0;
  bool satisfied = true;
};

inline void to_json(nlohmann::json& j, const Theorem2Report& r) {
  j = {{"delta_pure", r.delta_pure}, {"variance_sup", r.variance_sup}, {"states", r.states},
       {"violations", r.violations}, {"satisfied", r.satisfied}};
}

/// Pointwise check of sum_j p_j ||U(psi) - F_j(psi)||_1^2 <= 2 Delta over
/// `trials` Haar-random pure states, Delta estimated on the same states.
inline Theorem2Report theorem2_check(const ComplexMatrix& u, const ChannelMixture& mixture, std::size_t trials,
                                     Rng& rng, double slack = 1e-9) {
  if (trials == 0) {
    throw std::invalid_argument("theorem2_check: trials must be at least 1");
  }
  const ChannelMatrix avg = mixture_channel(mixture);
  const Eigen::Index d = u.rows();
  if (avg.in_dim() != d) {
    throw std::invalid_argument("theorem2_check: mixture dimension does not match U");
  }
  std::vector<double> variances;
  variances.reserve(trials);
  Theorem2Report rep;
  rep.states = trials;
  for (std::size_t k = 0; k < trials; ++k) {
    const ComplexVector psi = haar_state(d, rng);
    const ComplexMatrix rho = psi * psi.adjoint();
    const ComplexVector upsi = u * psi;
    const ComplexMatrix ideal = upsi * upsi.adjoint();
    rep.delta_pure = std::max(rep.delta_pure, trace_norm(ideal - avg.apply(rho)));
    double var = 0.0;
    for (const auto& [p, ch] : mixture) {
      const double e = trace_norm(ideal - ch.apply(rho));
      var += p * e * e;
    }
    variances.push_back(var);
    rep.variance_sup = std::max(rep.variance_sup, var);
  }
  for (double v : variances) {
    if (v > 2.0 * rep.delta_pure + slack) {
      ++rep.violations;
    }
  }
  rep.satisfied = rep.violations == 0;
  return rep;
}

}  // namespace hamxform
