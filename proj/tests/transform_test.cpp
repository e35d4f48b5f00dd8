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

// Transfer maps and the black-box seed oracle.

#include <gtest/gtest.h>

#include <map>
#include <numbers>

#include "hamxform/linalg.hpp"
#include "hamxform/seed_oracle.hpp"
#include "hamxform/transfer_map.hpp"
#include "hamxform/whitebox.hpp"
#include "support.hpp"

using namespace hamxform;

namespace {

PauliSum random_sum(std::size_t n, Rng& rng) {
  PauliSum h(n);
  for (const auto& v : all_words(n)) h.add(v, uniform01(rng) - 0.5);
  return h;
}

ComplexMatrix traceless(const ComplexMatrix& m) {
  const Eigen::Index d = m.rows();
  return m - m.trace() / static_cast<double>(d) * ComplexMatrix::Identity(d, d);
}

}  // namespace

TEST(TransferMap, Validation) {
  EXPECT_THROW(TransferMap(1, {{{1}, {0}, 1.0}}), std::invalid_argument);
  EXPECT_THROW(TransferMap(1, {{{1}, {1}, 1e-16}}), std::invalid_argument);
  EXPECT_THROW(TransferMap(1, {{{1}, {1}, 1.0}, {{1}, {1}, 2.0}}), std::invalid_argument);
  EXPECT_THROW(TransferMap(2, {{{1}, {1}, 1.0}}), std::invalid_argument);
  EXPECT_THROW(TransferMap(1, {}), std::invalid_argument);
  EXPECT_THROW(build_filter(2, {0, 0}), std::invalid_argument);
}

TEST(TransferMap, BetaIsTwiceAbsoluteSum) {
  const TransferMap f(1, {{{1}, {3}, 0.5}, {{2}, {1}, -0.25}});
  EXPECT_DOUBLE_EQ(f.beta(), 1.5);
  EXPECT_NEAR(f.probability(0) + f.probability(1), 1.0, 1e-15);
}

TEST(Apply, Examples) {
  PauliSum x(1, {{{1}, 1.0}});
  EXPECT_EQ(apply(build_negation(1), x).coefficient({1}), -1.0);
  PauliSum y(1, {{{2}, 1.0}});
  EXPECT_EQ(apply(build_transpose(1), y).coefficient({2}), -1.0);

  PauliSum h(2, {{{3, 3}, 0.4}, {{1, 0}, 0.1}});
  const PauliSum out = apply(build_filter(2, {3, 3}), h);
  ASSERT_EQ(out.terms().size(), 1u);
  EXPECT_NEAR(out.coefficient({2, 0}), 0.4, 1e-15);
}

TEST(Apply, IgnoresIdentityComponentAndIsLinear) {
  Rng rng(21);
  const TransferMap f = build_transpose(2);
  for (int k = 0; k < 10; ++k) {
    PauliSum a = random_sum(2, rng);
    const PauliSum b = random_sum(2, rng);
    const PauliSum lhs = apply(f, 0.3 * a + b);
    const PauliSum rhs = 0.3 * apply(f, a) + apply(f, b);
    for (const auto& v : all_words(2)) EXPECT_NEAR(lhs.coefficient(v), rhs.coefficient(v), 1e-12);
    PauliSum shifted = a;
    shifted.add(PauliIndexVector::identity(2), 5.0);
    const PauliSum s1 = apply(f, shifted);
    const PauliSum s0 = apply(f, a);
    for (const auto& v : all_words(2)) EXPECT_NEAR(s1.coefficient(v), s0.coefficient(v), 1e-12);
  }
}

TEST(BuildNegation, Examples) {
  const TransferMap full = build_negation(1);
  EXPECT_EQ(full.size(), 3u);
  EXPECT_DOUBLE_EQ(full.beta(), 6.0);
  const TransferMap one = build_negation(2, std::vector<PauliIndexVector>{{3, 3}});
  EXPECT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one.beta(), 2.0);
  PauliSum id(1, {{{0}, 1.0}});
  EXPECT_TRUE(apply(full, id).empty());
  EXPECT_DOUBLE_EQ(build_negation(2).beta(), 2.0 * 15.0);
}

TEST(BuildNegation, MatchesMatrixNegationOnTracelessPart) {
  Rng rng(22);
  for (int k = 0; k < 10; ++k) {
    const PauliSum h = random_sum(2, rng);
    const ComplexMatrix fh = reconstruct(apply(build_negation(2), h));
    EXPECT_LT(oracle::max_abs(fh + traceless(reconstruct(h))), 1e-12);
  }
}

TEST(BuildTranspose, SignTableAndMatrixTranspose) {
  const TransferMap f = build_transpose(1);
  std::map<int, double> gamma;
  for (const auto& e : f.entries()) {
    EXPECT_EQ(e.w, e.u);
    gamma[e.w[0]] = e.gamma;
  }
  EXPECT_EQ(gamma[1], 1.0);
  EXPECT_EQ(gamma[2], -1.0);
  EXPECT_EQ(gamma[3], 1.0);

  Rng rng(23);
  for (int k = 0; k < 10; ++k) {
    const PauliSum h = random_sum(2, rng);
    const ComplexMatrix m = reconstruct(h);
    const PauliSum once = apply(build_transpose(2), h);
    EXPECT_LT(oracle::max_abs(reconstruct(once) - traceless(m).transpose()), 1e-12);
    const PauliSum twice = apply(build_transpose(2), once);
    const PauliSum negneg = apply(build_negation(2), apply(build_negation(2), h));
    for (const auto& v : all_words(2)) EXPECT_NEAR(twice.coefficient(v), negneg.coefficient(v), 1e-12);
  }
}

TEST(BuildTranspose, FixesRealSymmetric) {
  PauliSum h(2, {{{1, 3}, 0.4}, {{3, 0}, -0.2}, {{2, 2}, 0.3}});
  const PauliSum out = apply(build_transpose(2), h);
  for (const auto& v : all_words(2)) EXPECT_NEAR(out.coefficient(v), h.coefficient(v), 1e-15);
}

TEST(BuildFilter, Examples) {
  const TransferMap f = build_filter(2, {3, 3});
  EXPECT_DOUBLE_EQ(f.beta(), 2.0);
  PauliSum h(2, {{{3, 3}, 0.35}, {{1, 1}, 0.2}});
  const PauliSum out = apply(f, h);
  EXPECT_NEAR(out.coefficient({2, 0}), 0.35, 1e-15);
  EXPECT_EQ(out.terms().size(), 1u);
  EXPECT_TRUE(apply(f, PauliSum(2, {{{1, 1}, 0.2}})).empty());
  for (std::uint64_t i = 1; i < num_words(3); ++i) {
    EXPECT_DOUBLE_EQ(build_filter(3, PauliIndexVector::from_index(3, i)).beta(), 2.0);
  }
}

TEST(SampleUw, SingleEntryAlwaysSame) {
  Rng rng(24);
  const TransferMap f = build_filter(2, {3, 3});
  for (int k = 0; k < 100; ++k) {
    const TransferSample s = sample_uw(f, rng);
    EXPECT_EQ(s.u, PauliIndexVector({3, 3}));
    EXPECT_EQ(s.w, PauliIndexVector({2, 0}));
    EXPECT_EQ(s.s_f, 0);
  }
}

TEST(SampleUw, NegationFrequenciesChiSquare) {
  Rng rng(25);
  const TransferMap f = build_negation(1);
  std::map<int, int> counts;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    const TransferSample s = sample_uw(f, rng);
    EXPECT_EQ(s.s_f, 1);
    EXPECT_EQ(s.u, s.w);
    ++counts[s.u[0]];
  }
  ASSERT_EQ(counts.size(), 3u);
  double chi2 = 0.0;
  const double expected = draws / 3.0;
  for (const auto& [k, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 2 degrees of freedom; 13.8 is the 0.999 quantile.
  EXPECT_LT(chi2, 13.8);
}

TEST(SampleUw, WeightedFrequenciesFollowGamma) {
  Rng rng(26);
  const TransferMap f(1, {{{1}, {3}, 0.5}, {{2}, {1}, -0.25}, {{3}, {2}, 0.25}});
  std::vector<int> counts(3, 0);
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) ++counts[f.sample(rng).entry];
  double chi2 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double e = draws * f.probability(i);
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  EXPECT_LT(chi2, 13.8);
}

TEST(SampleUw, TransposeSignFollowsY) {
  Rng rng(27);
  const TransferMap f = build_transpose(1);
  for (int k = 0; k < 1000; ++k) {
    const TransferSample s = sample_uw(f, rng);
    EXPECT_EQ(s.s_f == 1, s.w[0] == 2);
  }
}

TEST(SampleUw, IndexDrawMatchesFullDraw) {
  Rng a(28);
  Rng b(28);
  const TransferMap f = build_transpose(2);
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(f.sample(a).entry, f.sample_index(b));
}

TEST(TransferMapJson, RoundTrip) {
  const TransferMap f = build_transpose(2);
  const TransferMap g = transfer_map_from_json(nlohmann::json(f));
  ASSERT_EQ(g.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(g.entries()[i].w, f.entries()[i].w);
    EXPECT_EQ(g.entries()[i].gamma, f.entries()[i].gamma);
  }
}

TEST(SeedOracle, RejectsNegativeTime) {
  SeedOracle o = SeedOracle::with_exact_range(PauliSum(1, {{{3}, 1.0}}));
  ComplexVector psi = ComplexVector::Zero(2);
  psi(0) = 1.0;
  try {
    o.evolve(psi, -0.1);
    FAIL() << "negative time accepted";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("negative evolution time not available from black box"), std::string::npos);
  }
  EXPECT_THROW(o.evolve(psi, 0.0), std::domain_error);
  EXPECT_EQ(o.ledger().queries(), 0u);
}

TEST(SeedOracle, ZEvolutionFlipsPlusToMinus) {
  SeedOracle o = SeedOracle::with_exact_range(PauliSum(1, {{{3}, 1.0}}));
  ComplexVector plus(2);
  plus << 1.0, 1.0;
  plus /= std::sqrt(2.0);
  ComplexVector minus(2);
  minus << 1.0, -1.0;
  minus /= std::sqrt(2.0);
  ComplexVector psi = plus;
  // exp(-i Z pi/2) = -i Z
  o.evolve(psi, std::numbers::pi / 2);
  EXPECT_NEAR(std::abs(minus.dot(psi)), 1.0, 1e-12);
  // a full pi is -I, so |+> comes back up to phase
  psi = plus;
  o.evolve(psi, std::numbers::pi);
  EXPECT_NEAR(std::abs(plus.dot(psi)), 1.0, 1e-12);
}

TEST(SeedOracle, LedgerArithmetic) {
  SeedOracle o = SeedOracle::with_exact_range(PauliSum(1, {{{1}, 0.5}}));
  ComplexVector psi = ComplexVector::Zero(2);
  psi(0) = 1.0;
  o.evolve(psi, 0.3);
  o.evolve(psi, 0.7);
  EXPECT_EQ(o.ledger().queries(), 2u);
  EXPECT_NEAR(o.ledger().evolution_time(), 1.0, 1e-15);
}

TEST(SeedOracle, EvolveMatchesIndependentExponentialInEveryLayout) {
  Rng rng(29);
  const PauliSum h = random_sum(2, rng);
  SeedOracle o = SeedOracle::with_exact_range(h);
  const ComplexMatrix u = oracle::expm(reconstruct(h), 0.4);
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  for (auto [lead, trail] : {std::pair<Eigen::Index, Eigen::Index>{1, 1}, {2, 1}, {1, 2}, {2, 2}}) {
    const ComplexMatrix full = oracle::kron(lead == 2 ? i2 : ComplexMatrix::Identity(1, 1),
                                            oracle::kron(u, trail == 2 ? i2 : ComplexMatrix::Identity(1, 1)));
    const ComplexVector psi = haar_state(full.rows(), rng);
    ComplexVector x = psi;
    o.evolve(x, 0.4, SubsystemLayout{lead, trail});
    EXPECT_LT((x - full * psi).norm(), 1e-12);
    ComplexMatrix rho = psi * psi.adjoint();
    o.evolve(rho, 0.4, SubsystemLayout{lead, trail});
    EXPECT_LT(oracle::max_abs(rho - full * psi * psi.adjoint() * full.adjoint()), 1e-12);
  }
  ComplexVector y = haar_state(8, rng);
  const ComplexVector y0 = y;
  o.evolve_fixed<4>(y.data(), 0.4, 2);
  EXPECT_LT((y - oracle::kron(i2, u) * y0).norm(), 1e-12);
  EXPECT_EQ(o.ledger().queries(), 9u);
}

TEST(SeedOracle, DeltaValidation) {
  PauliSum h(1, {{{3}, 1.0}});
  EXPECT_THROW(SeedOracle(h, 1.5), std::invalid_argument);
  EXPECT_NO_THROW(SeedOracle(h, 2.0));
  EXPECT_NEAR(SeedOracle::with_exact_range(h).delta_h(), 2.0, 1e-12);
}

TEST(MakeRandomKlocal, Examples) {
  Rng rng(30);
  const SeedOracle zero = make_random_klocal(2, 2, 0.0, rng);
  EXPECT_EQ(zero.delta_h(), 0.0);

  for (int trial = 0; trial < 20; ++trial) {
    const SeedOracle o = make_random_klocal(2, 1, 1.0, rng);
    for (const auto& [v, c] : WhiteBox::hamiltonian(o).terms()) EXPECT_LE(v.weight(), 1u) << v.str();
    EXPECT_NEAR(o.delta_h(), spectral_range(reconstruct(WhiteBox::hamiltonian(o))), 1e-12);
  }
  const SeedOracle full = make_random_klocal(3, 3, 0.5, rng);
  EXPECT_GT(full.delta_h(), 0.0);
  EXPECT_THROW(make_random_klocal(2, 3, 1.0, rng), std::invalid_argument);
}
