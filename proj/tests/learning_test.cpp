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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hamxform/learning.hpp"
#include "hamxform/reference.hpp"
#include "support.hpp"

using namespace hamxform;

namespace {

constexpr double kPi = std::numbers::pi;

PauliSum two_qubit_h(double c33) {
  PauliSum h(2);
  h.add({1, 0}, 0.1).add({0, 2}, -0.05);
  if (c33 != 0.0) h.add({3, 3}, c33);
  return h;
}

double sample_std(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

TEST(MeasurementProbabilities, Examples) {
  auto p = measurement_probabilities(0.0, 3.0);
  EXPECT_DOUBLE_EQ(p.p0, 1.0);
  EXPECT_DOUBLE_EQ(p.pplus, 0.5);
  p = measurement_probabilities(kPi / 8.0, 2.0);
  EXPECT_NEAR(p.p0, 0.5, 1e-15);
  EXPECT_NEAR(p.pplus, 1.0, 1e-15);
}

TEST(MeasurementProbabilities, MatchExactFilteredEvolution) {
  Rng rng(31);
  const PauliSum h = decompose(random_hermitian(4, rng));
  const PauliIndexVector v({3, 3});
  const double c = h.coefficient(v);
  const TransferMap f = build_filter(2, v);
  for (double t : {0.25, 0.5, 1.0, 2.0, 8.0}) {
    ComplexVector zero = ComplexVector::Zero(4);
    zero(0) = 1.0;
    // Library exponential of f(H) and an independent one of c Y (x) I.
    const ComplexVector a = exact_transformed_evolution(h, f, t) * zero;
    const ComplexVector b = oracle::expm(c * oracle::pauli_word({2, 0}), t) * zero;
    const auto p = measurement_probabilities(c, t);
    for (const ComplexVector& psi : {a, b}) {
      EXPECT_NEAR(first_qubit_probability(psi, 4, Basis::Z), p.p0, 1e-10) << t;
      EXPECT_NEAR(first_qubit_probability(psi, 4, Basis::X), p.pplus, 1e-10) << t;
    }
  }
}

TEST(FirstQubitProbability, LeadingAndTrailingRegisters) {
  // |1> on ancilla, |+0> on system, |1> on reference.
  ComplexVector s = ComplexVector::Zero(4);
  s(0) = s(2) = 1.0 / std::sqrt(2.0);
  const ComplexVector psi = oracle::kron(oracle::kron(ComplexVector::Unit(2, 1), s), ComplexVector::Unit(2, 1));
  EXPECT_NEAR(first_qubit_probability(psi, 4, Basis::Z, 2, 2), 0.5, 1e-15);
  EXPECT_NEAR(first_qubit_probability(psi, 4, Basis::X, 2, 2), 1.0, 1e-15);
}

TEST(RpeSchedule, StageCountExample) {
  const RpeSchedule r = rpe_schedule(3.0 * kPi / 8.0, 0.0);
  EXPECT_EQ(r.K, 3);
  EXPECT_EQ(r.F, 1u);
  EXPECT_EQ(r.M, (std::vector<std::uint64_t>{7, 4, 1}));
}

TEST(RpeSchedule, ShotFactorByHand) {
  // a = 1 at zero bias: ln(1/2)/ln(1/2) = 1.
  EXPECT_EQ(rpe_shot_factor(0.0), 1u);
  // Default bias 1/(2 sqrt 8) gives a = 1/2: ln(1/4)/ln(7/8) = 10.38.
  EXPECT_EQ(rpe_shot_factor(kDefaultSimulationError), 11u);
  EXPECT_NEAR(std::log(0.25) / std::log(0.875), 10.381, 1e-3);
}

TEST(RpeSchedule, BoundaryEnforcement) {
  const std::uint64_t big = rpe_shot_factor(0.353);
  EXPECT_GT(big, 1000u);
  EXPECT_THROW(rpe_schedule(0.1, 0.36), std::invalid_argument);
  EXPECT_THROW(rpe_schedule(0.1, 1.0 / std::sqrt(8.0)), std::invalid_argument);
  EXPECT_THROW(rpe_schedule(0.1, -0.01), std::invalid_argument);
  EXPECT_THROW(rpe_schedule(0.0, 0.1), std::invalid_argument);
}

TEST(RpeSchedule, InvariantsOverSweep) {
  for (double s : {1.0, 0.3, 0.1, 0.05, 0.02, 0.0125}) {
    for (double d : {0.0, 0.1, kDefaultSimulationError}) {
      const RpeSchedule r = rpe_schedule(s, d);
      EXPECT_EQ(r.K, static_cast<int>(std::ceil(std::log2(3.0 * kPi / s))));
      ASSERT_EQ(r.M.size(), static_cast<std::size_t>(r.K));
      double time = 0.0;
      for (int j = 1; j <= r.K; ++j) {
        EXPECT_EQ(r.M[j - 1], r.F * static_cast<std::uint64_t>(3 * (r.K - j) + 1));
        time += 2.0 * static_cast<double>(r.M[j - 1]) * std::pow(2.0, j - 1);
      }
      EXPECT_DOUBLE_EQ(r.total_evolution_time(), time);
    }
  }
  const RpeSchedule r = rpe_schedule(0.02, kDefaultSimulationError);
  EXPECT_EQ(r.K, 9);
  EXPECT_EQ(r.M.front(), 275u);
  EXPECT_EQ(r.M.back(), 11u);
}

TEST(RpeSchedule, TimeScalesInverselyWithS) {
  double prev = 0.0;
  for (double s : {0.1, 0.05, 0.025, 0.0125}) {
    const double t = rpe_schedule(s, kDefaultSimulationError).total_evolution_time();
    if (prev > 0.0) EXPECT_LT(t, 3.0 * prev);
    prev = t;
  }
}

TEST(RpeMeasurement, LedgerChargePerShot) {
  SeedOracle oracle = SeedOracle::with_exact_range(two_qubit_h(0.35));
  Rng rng(32);
  for (int j = 1; j <= 4; ++j) {
    const Ledger before = oracle.ledger();
    rpe_measurement(oracle, {3, 3}, j, Basis::Z, kDefaultSimulationError, rng);
    EXPECT_NEAR(oracle.ledger().since(before).evolution_time(), std::pow(2.0, j - 1), 1e-12);
  }
  EXPECT_THROW(rpe_measurement(oracle, {3, 3}, 0, Basis::Z, 0.1, rng), std::invalid_argument);
}

TEST(RpeMeasurement, NullCoefficientBiasWithinSimulationError) {
  SeedOracle oracle = SeedOracle::with_exact_range(two_qubit_h(0.0));
  Rng rng(33);
  const int shots = 2000;
  int ones = 0;
  for (int k = 0; k < shots; ++k) ones += rpe_measurement(oracle, {3, 3}, 2, Basis::Z, kDefaultSimulationError, rng);
  const double freq = static_cast<double>(ones) / shots;
  EXPECT_LE(freq, kDefaultSimulationError + 3.0 * std::sqrt(0.25 / shots));
}

TEST(RpeMeasurement, FrequenciesTrackFormula) {
  const double c = 0.35;
  SeedOracle oracle = SeedOracle::with_exact_range(two_qubit_h(c));
  Rng rng(34);
  const int shots = 10000;
  for (int j : {1, 3}) {
    const auto p = measurement_probabilities(c, RpeSchedule::stage_time(j));
    int z = 0, x = 0;
    for (int k = 0; k < shots; ++k) {
      z += rpe_measurement(oracle, {3, 3}, j, Basis::Z, kDefaultSimulationError, rng) == 0;
      x += rpe_measurement(oracle, {3, 3}, j, Basis::X, kDefaultSimulationError, rng) == 0;
    }
    const double allow = kDefaultSimulationError + 3.0 * std::sqrt(0.25 / shots);
    EXPECT_NEAR(static_cast<double>(z) / shots, p.p0, allow) << j;
    EXPECT_NEAR(static_cast<double>(x) / shots, p.pplus, allow) << j;
  }
}

TEST(EstimateParameter, LedgerEqualsScheduleTime) {
  SeedOracle oracle = SeedOracle::with_exact_range(two_qubit_h(0.35));
  const RpeSchedule sch = rpe_schedule(0.1, kDefaultSimulationError);
  double expect = 0.0;
  for (int j = 1; j <= sch.K; ++j) expect += 2.0 * static_cast<double>(sch.M[j - 1]) * std::ldexp(1.0, j - 1);
  Rng rng(35);
  const RpeResult r = estimate_parameter(oracle, {3, 3}, 0.1, rng);
  EXPECT_NEAR(oracle.ledger().evolution_time(), expect, 1e-9 * expect);
  ASSERT_EQ(r.stages.size(), static_cast<std::size_t>(sch.K));
  EXPECT_EQ(r.stages.back().theta, r.estimate);
  EXPECT_NEAR(r.estimate, 0.35, 0.3);
}

TEST(EstimateParameter, NullCoefficient) {
  SeedOracle oracle = SeedOracle::with_exact_range(two_qubit_h(0.0));
  Rng rng(36);
  const double s = 0.1;
  EXPECT_NEAR(estimate_parameter(oracle, {3, 3}, s, rng).estimate, 0.0, 3.0 * s);
}

TEST(EstimateParameter, SignFlipOfCoefficientNegatesEstimate) {
  const double s = 0.1;
  for (std::uint64_t k = 0; k < 4; ++k) {
    SeedOracle plus = SeedOracle::with_exact_range(two_qubit_h(0.35));
    SeedOracle minus = SeedOracle::with_exact_range(two_qubit_h(-0.35));
    Rng a = make_rng(37, 0, k);
    Rng b = make_rng(37, 0, k);
    const double ep = estimate_parameter(plus, {3, 3}, s, a).estimate;
    const double em = estimate_parameter(minus, {3, 3}, s, b).estimate;
    EXPECT_NEAR(ep, 0.35, 3.0 * s);
    EXPECT_NEAR(em, -0.35, 3.0 * s);
  }
}

TEST(EstimateParameter, WordLengthMismatch) {
  SeedOracle oracle = SeedOracle::with_exact_range(two_qubit_h(0.35));
  Rng rng(38);
  EXPECT_THROW(estimate_parameter(oracle, {3}, 0.1, rng), std::invalid_argument);
}

TEST(RpeEstimate, AnalyticSourceMeetsTargetDeviation) {
  // Outcome bias up to the schedule's delta_sup is allowed.
  for (double bias : {0.0, 0.5 * kDefaultSimulationError, -0.5 * kDefaultSimulationError}) {
    for (double s : {0.1, 0.02}) {
      const RpeSchedule sch = rpe_schedule(s, kDefaultSimulationError);
      std::vector<double> est;
      for (std::uint64_t k = 0; k < 300; ++k) {
        Rng rng = make_rng(39, 0, k);
        est.push_back(rpe_estimate(sch, AnalyticSource{0.35, bias}, rng).estimate);
      }
      double mse = 0.0;
      for (double e : est) mse += (e - 0.35) * (e - 0.35);
      EXPECT_LE(std::sqrt(mse / est.size()), s) << "bias " << bias << " s " << s;
      EXPECT_LE(sample_std(est), s);
    }
  }
}

TEST(RpeEstimate, AnalyticSourceIsEquivariant) {
  const RpeSchedule sch = rpe_schedule(0.05, kDefaultSimulationError);
  std::vector<double> plus, minus;
  for (std::uint64_t k = 0; k < 200; ++k) {
    Rng a = make_rng(40, 0, k);
    Rng b = make_rng(40, 1, k);
    plus.push_back(rpe_estimate(sch, AnalyticSource{0.6}, a).estimate);
    minus.push_back(rpe_estimate(sch, AnalyticSource{-0.6}, b).estimate);
  }
  EXPECT_NEAR(median(plus), -median(minus), 0.05);
  EXPECT_NEAR(sample_std(plus), sample_std(minus), 0.05);
}

TEST(MedianAmplify, RepeatCount) {
  EXPECT_EQ(median_repeats(1.0 / std::numbers::e), 18u);
  EXPECT_EQ(median_repeats(0.1), 42u);
  EXPECT_THROW(median_repeats(0.0), std::invalid_argument);
  EXPECT_THROW(median_repeats(1.0), std::invalid_argument);
}

TEST(MedianAmplify, MedianOfIdenticalAndEvenCounts) {
  EXPECT_EQ(median({0.3, 0.3, 0.3}), 0.3);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(MedianAmplify, FailureRateBelowDelta) {
  const double eps = 0.1, delta = 0.1;
  const int meta = 200;
  int failures = 0;
  for (int k = 0; k < meta; ++k) {
    Rng rng = make_rng(41, 0, static_cast<std::uint64_t>(k));
    const double est = median_amplify_with(AnalyticSource{0.35, 0.05}, eps, delta, rng);
    failures += std::abs(est - 0.35) > eps;
  }
  EXPECT_LE(static_cast<double>(failures) / meta, delta + 3.0 * std::sqrt(delta * (1 - delta) / meta));
}

TEST(MedianAmplify, ThroughTheOracle) {
  SeedOracle oracle = SeedOracle::with_exact_range(two_qubit_h(0.35));
  Rng rng(42);
  EXPECT_NEAR(median_amplify(oracle, {3, 3}, 0.5, 0.5, rng), 0.35, 0.5);
  EXPECT_THROW(median_amplify(oracle, {3, 3}, 1.5, 0.5, rng), std::invalid_argument);
}
