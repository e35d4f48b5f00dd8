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

// Single-coefficient learning: the filter map turns H into c_v Y (x) I...,
// and robust phase estimation reads c_v off the first qubit.
//
// Stage j (1..K) evolves for t = 2^{j-2}, so each outcome depends on
// k theta with k = 2^{j-1} and theta = c_v.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hamxform/engine.hpp"
#include "hamxform/rng.hpp"
#include "hamxform/seed_oracle.hpp"
#include "hamxform/transfer_map.hpp"

namespace hamxform {

struct OutcomeProbabilities {
  double p0 = 1.0;
  double pplus = 0.5;
};

/// p0 = (1 + cos 2ct)/2, p+ = (1 + sin 2ct)/2 for e^{-i c t Y}|0>.
inline OutcomeProbabilities measurement_probabilities(double c, double t) {
  return {0.5 * (1.0 + std::cos(2.0 * c * t)), 0.5 * (1.0 + std::sin(2.0 * c * t))};
}

/// 1/(2 sqrt 8): the per-shot simulation error used for the filtered dynamics.
inline const double kDefaultSimulationError = 1.0 / (2.0 * std::sqrt(8.0));

inline const double kMaxBias = 1.0 / std::sqrt(8.0);

/// F(delta) = ceil(ln(1/2 (1 - sqrt8 delta)) / ln(1 - 1/2 (1 - sqrt8 delta)^2)).
inline std::uint64_t rpe_shot_factor(double delta_sup) {
  if (!(delta_sup >= 0.0) || !(delta_sup < kMaxBias)) {
    throw std::invalid_argument("rpe_schedule: delta_sup must lie in [0, 1/sqrt(8)), got " +
                                std::to_string(delta_sup));
  }
  const double a = 1.0 - std::sqrt(8.0) * delta_sup;
  const double ratio = std::log(0.5 * a) / std::log(1.0 - 0.5 * a * a);
  if (!std::isfinite(ratio) || ratio > 1e12) {
    throw std::invalid_argument("rpe_schedule: delta_sup too close to 1/sqrt(8)");
  }
  // The ratio is exactly 1 at delta_sup = 0; keep rounding noise from adding a shot.
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(ratio - 1e-12)));
}

struct RpeSchedule {
  double s = 0.0;
  double delta_sup = 0.0;
  int K = 0;
  std::uint64_t F = 0;
  std::vector<std::uint64_t> M;  // M[j-1]

  /// Evolution time of one shot at stage j: t = 2^{j-2}.
  static double stage_time(int j) { return std::ldexp(1.0, j - 2); }
  /// Phase multiplier at stage j: 2^{j-1}.
  static double multiplier(int j) { return std::ldexp(1.0, j - 1); }

  /// sum_j 2 M_j 2^{j-1}: oracle evolution time of the schedule with beta = 2.
  double total_evolution_time() const {
    double total = 0.0;
    for (int j = 1; j <= K; ++j) {
      total += 2.0 * static_cast<double>(M[static_cast<std::size_t>(j - 1)]) * multiplier(j);
    }
    return total;
  }

  std::uint64_t total_shots() const {
    std::uint64_t total = 0;
    for (auto m : M) {
      total += 2 * m;
    }
    return total;
  }
};

inline void to_json(nlohmann::json& j, const RpeSchedule& r) {
  j = {{"s", r.s}, {"delta_sup", r.delta_sup}, {"K", r.K}, {"F", r.F}, {"M", r.M}};
}

/// K = ceil(log2(3 pi / s)), M_j = F (3(K - j) + 1).
inline RpeSchedule rpe_schedule(double s, double delta_sup) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("rpe_schedule: s must be positive");
  }
  RpeSchedule r;
  r.s = s;
  r.delta_sup = delta_sup;
  r.F = rpe_shot_factor(delta_sup);
  r.K = std::max(1, static_cast<int>(std::ceil(std::log2(3.0 * std::numbers::pi / s) - 1e-12)));
  for (int j = 1; j <= r.K; ++j) {
    r.M.push_back(r.F * static_cast<std::uint64_t>(3 * (r.K - j) + 1));
  }
  return r;
}

enum class Basis { Z, X };

/// Probability of outcome 0 (Z) or + (X) for the first system qubit of a
/// pure state laid out as [leading][system][trailing].
inline double first_qubit_probability(const ComplexVector& psi, Eigen::Index sys_dim, Basis basis,
                                      Eigen::Index leading_dim = 1, Eigen::Index trailing_dim = 1) {
  const Eigen::Index half = sys_dim / 2 * trailing_dim;
  double p = 0.0;
  for (Eigen::Index a = 0; a < leading_dim; ++a) {
    const Complex* base = psi.data() + a * sys_dim * trailing_dim;
    for (Eigen::Index k = 0; k < half; ++k) {
      if (basis == Basis::Z) {
        p += std::norm(base[k]);
      } else {
        p += 0.5 * std::norm(base[k] + base[k + half]);
      }
    }
  }
  return std::clamp(p, 0.0, 1.0);
}

/// One shot: Algorithm 1 trajectory for e^{-i f_v(H) t}, t = 2^{j-2}, on
/// |0...0>, then a first-qubit measurement. Returns 0 for outcome 0 / +.
inline int rpe_measurement(SeedOracle& oracle, const PauliIndexVector& v, int j, Basis basis, double epsilon_sim,
                           Rng& rng) {
  if (j < 1) {
    throw std::invalid_argument("rpe_measurement: stage index must be at least 1");
  }
  const TransferMap f = build_filter(oracle.num_qubits(), v);
  const double t = RpeSchedule::stage_time(j);
  const std::uint64_t iterations = iteration_count(f.beta(), t, oracle.delta_h(), epsilon_sim);
  const double tau = t * f.beta() / static_cast<double>(iterations);
  ComplexVector psi = ComplexVector::Zero(oracle.dim());
  psi(0) = 1.0;
  const ComplexVector joint = run_trajectory_state(oracle, f, psi, tau, iterations, rng);
  const double p = first_qubit_probability(joint, oracle.dim(), basis, 2, 1);
  return uniform01(rng) < p ? 0 : 1;
}

struct StageTally {
  int j = 0;
  double multiplier = 0.0;
  std::uint64_t shots = 0;  // per basis
  std::uint64_t zeros = 0;  // Z-basis outcome 0
  std::uint64_t plus = 0;   // X-basis outcome +
  double phase = 0.0;       // estimate of k theta mod 2 pi
  double theta = 0.0;       // running estimate after this stage
};

inline void to_json(nlohmann::json& j, const StageTally& s) {
  j = {{"j", s.j},         {"multiplier", s.multiplier}, {"shots_per_basis", s.shots}, {"zeros", s.zeros},
       {"plus", s.plus},   {"phase", s.phase},           {"theta", s.theta}};
}

struct RpeResult {
  double estimate = 0.0;
  std::vector<StageTally> stages;
};

namespace detail {

inline double wrap_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  x = std::fmod(x, two_pi);
  if (x > std::numbers::pi) {
    x -= two_pi;
  } else if (x <= -std::numbers::pi) {
    x += two_pi;
  }
  return x;
}

}  // namespace detail

/// Robust phase estimation with sector narrowing. `source(j, basis, rng)`
/// returns one outcome bit at stage j. Stage 1 fixes theta in (-pi, pi];
/// each later stage picks the branch (phi + 2 pi m)/k nearest the previous
/// estimate.
template <class Source>
RpeResult rpe_estimate(const RpeSchedule& schedule, Source&& source, Rng& rng) {
  RpeResult out;
  double theta = 0.0;
  for (int j = 1; j <= schedule.K; ++j) {
    StageTally tally;
    tally.j = j;
    tally.multiplier = RpeSchedule::multiplier(j);
    tally.shots = schedule.M[static_cast<std::size_t>(j - 1)];
    for (std::uint64_t m = 0; m < tally.shots; ++m) {
      tally.zeros += source(j, Basis::Z, rng) == 0 ? 1 : 0;
    }
    for (std::uint64_t m = 0; m < tally.shots; ++m) {
      tally.plus += source(j, Basis::X, rng) == 0 ? 1 : 0;
    }
    const double n = static_cast<double>(tally.shots);
    const double c = 2.0 * static_cast<double>(tally.zeros) / n - 1.0;
    const double s = 2.0 * static_cast<double>(tally.plus) / n - 1.0;
    tally.phase = std::atan2(s, c);
    if (j == 1) {
      theta = tally.phase;
    } else {
      const double k = tally.multiplier;
      // Nearest branch: shift the previous estimate's phase residual into (-pi, pi].
      const double residual = detail::wrap_angle(tally.phase - k * theta);
      theta += residual / k;
    }
    tally.theta = theta;
    out.stages.push_back(tally);
  }
  out.estimate = theta;
  return out;
}

/// Outcomes drawn from the exact probabilities for coefficient theta,
/// optionally biased by `bias` (kept inside [0, 1]).
struct AnalyticSource {
  double theta = 0.0;
  double bias = 0.0;

  int operator()(int j, Basis basis, Rng& rng) const {
    const auto p = measurement_probabilities(theta, RpeSchedule::stage_time(j));
    const double q = std::clamp((basis == Basis::Z ? p.p0 : p.pplus) + bias, 0.0, 1.0);
    return uniform01(rng) < q ? 0 : 1;
  }
};

/// Estimate of c_v from the black box with target standard deviation s.
/// delta_sup defaults to epsilon_sim, the bias one simulated shot can carry.
inline RpeResult estimate_parameter(SeedOracle& oracle, const PauliIndexVector& v, double s, Rng& rng,
                                    double epsilon_sim = kDefaultSimulationError,
                                    std::optional<double> delta_sup = std::nullopt) {
  if (v.size() != oracle.num_qubits()) {
    throw std::invalid_argument("estimate_parameter: word length does not match the oracle");
  }
  const RpeSchedule schedule = rpe_schedule(s, delta_sup.value_or(epsilon_sim));
  auto source = [&](int j, Basis b, Rng& r) { return rpe_measurement(oracle, v, j, b, epsilon_sim, r); };
  return rpe_estimate(schedule, source, rng);
}

/// ceil(18 ln(1/delta)).
inline std::uint64_t median_repeats(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("median_amplify: delta must lie in (0, 1)");
  }
  return static_cast<std::uint64_t>(std::ceil(18.0 * std::log(1.0 / delta) - 1e-12));
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) {
    throw std::invalid_argument("median: empty sample");
  }
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

/// Median of ceil(18 ln(1/delta)) runs at s = epsilon/2, each drawing
/// outcomes from `source`.
template <class Source>
double median_amplify_with(Source&& source, double epsilon, double delta, Rng& rng,
                           double delta_sup = kDefaultSimulationError) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("median_amplify: epsilon must lie in (0, 1)");
  }
  const std::uint64_t repeats = median_repeats(delta);
  const RpeSchedule schedule = rpe_schedule(epsilon / 2.0, delta_sup);
  std::vector<double> estimates;
  estimates.reserve(repeats);
  for (std::uint64_t r = 0; r < repeats; ++r) {
    estimates.push_back(rpe_estimate(schedule, source, rng).estimate);
  }
  return median(std::move(estimates));
}

inline double median_amplify(SeedOracle& oracle, const PauliIndexVector& v, double epsilon, double delta, Rng& rng,
                             double epsilon_sim = kDefaultSimulationError) {
  if (v.size() != oracle.num_qubits()) {
    throw std::invalid_argument("median_amplify: word length does not match the oracle");
  }
  auto source = [&](int j, Basis b, Rng& r) { return rpe_measurement(oracle, v, j, b, epsilon_sim, r); };
  return median_amplify_with(source, epsilon, delta, rng, epsilon_sim);
}

}  // namespace hamxform
