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

#include "hamxform/block_encoding.hpp"
#include "hamxform/reference.hpp"
#include "support.hpp"

using namespace hamxform;

namespace {

ComplexMatrix z_first(std::size_t n) {
  std::vector<int> w(n, 0);
  w[0] = 3;
  return oracle::pauli_word(w);
}

/// Random A with singular values drawn from (lo, hi).
ComplexMatrix random_contraction(Eigen::Index m, Rng& rng, double lo = 0.1, double hi = 0.9) {
  const ComplexMatrix u = haar_unitary(m, rng);
  const ComplexMatrix v = haar_unitary(m, rng);
  ComplexMatrix s = ComplexMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) s(i, i) = lo + (hi - lo) * uniform01(rng);
  return u * s * v.adjoint();
}

}  // namespace

TEST(HprimeMap, MatchesZConjugationFormulaOnRandomMatrices) {
  Rng rng(51);
  for (std::size_t n = 1; n <= 3; ++n) {
    const TransferMap f = build_hprime_map(n);
    const TransferMap g = build_neg_hprime_map(n);
    const ComplexMatrix z = z_first(n);
    for (int k = 0; k < 100; ++k) {
      const ComplexMatrix m = random_hermitian(Eigen::Index{1} << n, rng);
      const ComplexMatrix expect = 0.5 * (m - z * m * z);
      const PauliSum h = decompose(m);
      EXPECT_LT(oracle::max_abs(reconstruct(f.apply(h)) - expect), 1e-12);
      EXPECT_LT(oracle::max_abs(reconstruct(g.apply(h)) + expect), 1e-12);
    }
  }
}

TEST(HprimeMap, LeavesOffDiagonalBlockHamiltonianUnchanged) {
  Rng rng(52);
  const BlockHamiltonian b(random_contraction(2, rng));
  const ComplexMatrix out = reconstruct(build_hprime_map(2).apply(b.pauli()));
  EXPECT_LT(oracle::max_abs(out - b.matrix()), 1e-12);
}

TEST(HprimeMap, ZeroesDiagonalBlocksAndKeepsOffDiagonal) {
  Rng rng(53);
  const ComplexMatrix a = random_contraction(2, rng);
  const BlockHamiltonian b(a, random_hermitian(2, rng), random_hermitian(2, rng));
  const ComplexMatrix out = reconstruct(build_hprime_map(2).apply(b.pauli()));
  ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
  expect.block(0, 2, 2, 2) = a.adjoint();
  expect.block(2, 0, 2, 2) = a;
  EXPECT_LT(oracle::max_abs(out - expect), 1e-12);
  EXPECT_LT(oracle::max_abs(b.hprime() - expect), 1e-15);
}

TEST(HprimeMap, SignSelection) {
  EXPECT_EQ(hprime_map_for_sign(2, '+').entries().front().gamma, -1.0);
  EXPECT_EQ(hprime_map_for_sign(2, '-').entries().front().gamma, 1.0);
  EXPECT_THROW(hprime_map_for_sign(2, '*'), std::invalid_argument);
  EXPECT_THROW(build_hprime_map(0), std::invalid_argument);
}

TEST(HprimeClassT, TotalWeightAndAncillaZeroBlock) {
  Rng rng(54);
  for (std::size_t n = 1; n <= 2; ++n) {
    const double beta_neg = classt_totals(build_negation(n)).total_weight();
    const Eigen::Index d = Eigen::Index{1} << n;
    const ComplexMatrix h = random_hermitian(d, rng);
    const ComplexMatrix z = z_first(n);
    const ComplexMatrix hp = 0.5 * (h - z * h * z);
    for (char sign : {'+', '-'}) {
      const ClassTMap g = hprime_classt_map(n, sign);
      EXPECT_NEAR(g.total_weight(), (beta_neg + 1.0) / 2.0, 1e-12);
      const ComplexMatrix out = classt_apply(g, oracle::kron(ComplexMatrix::Identity(2, 2), h));
      const ComplexMatrix block = out.topLeftCorner(d, d);
      const double s = sign == '+' ? 1.0 : -1.0;
      EXPECT_LT(oracle::max_abs(strip_identity(block) - strip_identity(s * hp)), 1e-10) << n << sign;
    }
  }
  // Negation weight 2(4^n - 1), so (beta + 1)/2 is 3.5 at n=1 and 15.5 at n=2.
  EXPECT_NEAR(hprime_classt_map(1, '+').total_weight(), 3.5, 1e-12);
  EXPECT_NEAR(hprime_classt_map(2, '-').total_weight(), 15.5, 1e-12);
  EXPECT_THROW(hprime_classt_map(1, 'x'), std::invalid_argument);
}

TEST(ExactUofA, ZeroAndIdentityBlocks) {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  ComplexMatrix expect0 = ComplexMatrix::Zero(4, 4);
  expect0.topLeftCorner(2, 2) = kI * i2;
  expect0.bottomRightCorner(2, 2) = -kI * i2;
  EXPECT_LT(oracle::max_abs(exact_u_of_A(ComplexMatrix::Zero(2, 2)) - expect0), 1e-15);
  ComplexMatrix expect1 = ComplexMatrix::Zero(4, 4);
  expect1.topRightCorner(2, 2) = kI * i2;
  expect1.bottomLeftCorner(2, 2) = kI * i2;
  EXPECT_LT(oracle::max_abs(exact_u_of_A(i2) - expect1), 1e-7);
}

TEST(ExactUofA, RandomContractionsAreUnitaryWithLowerLeftIA) {
  Rng rng(55);
  for (int k = 0; k < 20; ++k) {
    const ComplexMatrix a = random_contraction(2 + 2 * (k % 2), rng, 0.01, 0.99);
    const ComplexMatrix u = exact_u_of_A(a);
    EXPECT_LT(oracle::max_abs(u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols())), 1e-10);
    EXPECT_EQ(u.bottomLeftCorner(a.rows(), a.cols()), (kI * a).eval());
  }
  EXPECT_THROW(exact_u_of_A(1.5 * ComplexMatrix::Identity(2, 2)), std::invalid_argument);
}

TEST(BlockHamiltonian, Validation) {
  EXPECT_THROW(BlockHamiltonian(ComplexMatrix::Identity(3, 3)), std::invalid_argument);
  EXPECT_THROW(BlockHamiltonian(1.01 * ComplexMatrix::Identity(2, 2)), std::invalid_argument);
  EXPECT_THROW(BlockHamiltonian(ComplexMatrix::Zero(2, 2)), std::invalid_argument);
  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  EXPECT_THROW(BlockHamiltonian(0.5 * ComplexMatrix::Identity(2, 2), bad), std::invalid_argument);
  const BlockHamiltonian b(0.5 * ComplexMatrix::Identity(2, 2));
  EXPECT_EQ(b.num_qubits(), 2u);
  EXPECT_NEAR(b.lambda_min(), 0.5, 1e-15);
  EXPECT_LT(oracle::max_abs(reconstruct(b.pauli()) - b.matrix()), 1e-15);
}

TEST(BlockHamiltonian, JsonRoundTrip) {
  Rng rng(56);
  const BlockHamiltonian b(random_contraction(2, rng), random_hermitian(2, rng));
  const BlockHamiltonian back = block_hamiltonian_from_json(block_hamiltonian_to_json(b));
  EXPECT_LT(oracle::max_abs(back.matrix() - b.matrix()), 1e-15);
}

TEST(SimulateHprime, ZeroDiagonalMinusSignMatchesPlainEvolution) {
  Rng rng(57);
  const BlockHamiltonian b(random_contraction(1, rng));
  SeedOracle oracle = SeedOracle::with_exact_range(b.pauli());
  RunConfig rc;
  rc.t = 0.3;
  rc.epsilon = 0.05;
  rc.mode = RunMode::averaged_exact;
  const BlockSimulation sim = simulate_hprime_evolution(oracle, '-', ComplexVector::Unit(2, 0), rc, b);
  const ComplexMatrix plain = oracle::expm(b.matrix(), rc.t);
  ASSERT_TRUE(sim.run.channel.has_value());
  EXPECT_LE(choi_distance(*sim.run.channel, unitary_channel(plain)), rc.epsilon);
  EXPECT_NEAR(sim.run.report.ledger.evolution_time(), sim.map.beta() * rc.t, 1e-12);
}

TEST(SimulateHprime, PlusSignTwoQubitsWithinEpsilon) {
  const BlockHamiltonian b(0.5 * ComplexMatrix::Identity(2, 2));
  SeedOracle oracle = SeedOracle::with_exact_range(b.pauli());
  RunConfig rc;
  rc.t = 1.0;
  rc.epsilon = 0.05;
  rc.mode = RunMode::averaged_exact;
  const BlockSimulation sim = simulate_hprime_evolution(oracle, '+', ComplexVector::Unit(4, 0), rc, b);
  // Oracle target e^{+iH't} from the independent exponential.
  const ComplexMatrix target = oracle::expm(b.hprime(), -rc.t);
  EXPECT_LT(oracle::max_abs(sim.target - target), 1e-10);
  EXPECT_LE(choi_distance(*sim.run.channel, unitary_channel(target)), 0.05);
  EXPECT_NEAR(sim.run.report.ledger.evolution_time(), sim.map.beta() * rc.t, 1e-12);
}

TEST(SimulateHprime, OracleSizeMismatch) {
  const BlockHamiltonian b(0.5 * ComplexMatrix::Identity(2, 2));
  SeedOracle oracle = SeedOracle::with_exact_range(PauliSum(1, {{{3}, 1.0}}));
  EXPECT_THROW(simulate_hprime_evolution(oracle, '+', ComplexVector::Unit(2, 0), RunConfig{}, b),
               std::invalid_argument);
}

TEST(QsvtBudget, HandValueAndGrowth) {
  EXPECT_EQ(qsvt_query_budget(0.1, 1.0), 3u);
  EXPECT_EQ(qsvt_query_budget(0.1, 0.5), 5u);
  for (double lam : {1.0, 0.3, 0.05}) {
    for (double eps : {0.1, 0.01, 1e-4}) {
      const auto d1 = qsvt_query_budget(eps, lam);
      const auto d2 = qsvt_query_budget(eps / 2.0, lam);
      EXPECT_LE(static_cast<double>(d2 - d1), std::log(2.0) / lam + 1.0);
    }
  }
  EXPECT_THROW(qsvt_query_budget(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(qsvt_query_budget(0.1, 0.0), std::invalid_argument);
}

TEST(QsvtBudget, ErrorIdentityHoldsForAnyDegree) {
  for (std::uint64_t d = 1; d <= 1000; d *= 3) {
    for (double eps : {0.5, 0.1, 1e-3}) EXPECT_NEAR(qsvt_error_total(eps, d), eps, 1e-15);
  }
}
