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

// Self-contained verification suites. Each returns a pass flag plus metrics.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamxform/classt.hpp"
#include "hamxform/engine.hpp"
#include "hamxform/linalg.hpp"
#include "hamxform/metrics.hpp"
#include "hamxform/pauli.hpp"
#include "hamxform/reference.hpp"
#include "hamxform/rng.hpp"
#include "hamxform/seed_oracle.hpp"
#include "hamxform/transfer_map.hpp"

namespace hamxform {

struct VerifyOptions {
  std::size_t n = 1;
  std::uint64_t seed = 0;
  std::size_t hamiltonians = 20;       // lemma4
  std::size_t trajectories = 2000;     // variance
  std::size_t inputs = 10;             // variance
  std::size_t mixtures = 100;          // theorem2
  std::size_t states = 200;            // theorem2
  std::size_t grid = 1000;             // qdrift-bound
  std::size_t matrices = 100;          // twirl
  std::vector<double> epsilons{0.2, 0.1, 0.05};  // error, theorem2
  double variance_epsilon = 0.1;
};

struct SuiteReport {
  std::string name;
  bool pass = false;
  nlohmann::json metrics = nlohmann::json::object();
  Ledger ledger;
};

namespace verify_detail {

inline constexpr std::uint64_t kLemma4Stream = 0x6c656d34;
inline constexpr std::uint64_t kVarianceStream = 0x76617269;
inline constexpr std::uint64_t kTheorem2Stream = 0x74686d32;
inline constexpr std::uint64_t kGridStream = 0x67726964;
inline constexpr std::uint64_t kTwirlStream = 0x7477726c;

/// Random Hamiltonian with all 4^n coefficients uniform in [-1, 1].
inline PauliSum random_pauli_sum(std::size_t n, Rng& rng) {
  PauliSum h(n);
  for (const auto& v : all_words(n)) {
    h.add(v, 2.0 * uniform01(rng) - 1.0);
  }
  return h;
}

/// The demo Hamiltonian 0.7 X + 0.3 Z.
inline PauliSum demo_hamiltonian() {
  PauliSum h(1);
  h.add({1}, 0.7).add({3}, 0.3);
  return h;
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

inline std::vector<std::pair<std::string, TransferMap>> lemma4_maps(std::size_t n) {
  std::vector<std::pair<std::string, TransferMap>> maps;
  maps.emplace_back("negation", build_negation(n));
  maps.emplace_back("transpose", build_transpose(n));
  for (int k = 1; k <= 3; ++k) {
    std::vector<std::uint8_t> v(n, 0);
    v[0] = static_cast<std::uint8_t>(k);
    maps.emplace_back("filter-" + PauliIndexVector(v).str(), build_filter(n, PauliIndexVector(v)));
  }
  return maps;
}

}  // namespace verify_detail

/// g_total(I (x) H) against diag(f(H), -f(H)) modulo identity, plus the
/// stage-chain sum.
inline SuiteReport verify_lemma4(const VerifyOptions& opt) {
  using namespace verify_detail;
  if (opt.n < 1 || opt.n > 2) {
    throw std::invalid_argument("verify lemma4: n must be 1 or 2");
  }
  SuiteReport rep{"lemma4"};
  double worst = 0.0;
  double worst_chain = 0.0;
  const auto maps = lemma4_maps(opt.n);
  for (std::size_t k = 0; k < opt.hamiltonians; ++k) {
    Rng rng = make_rng(opt.seed, kLemma4Stream, k);
    const PauliSum h = random_pauli_sum(opt.n, rng);
    for (const auto& [name, f] : maps) {
      const ComplexMatrix g = g_total_bruteforce(h, f);
      worst = std::max(worst, max_abs(strip_identity(g) - strip_identity(g_total_target(h, f))));
      if (k == 0) {
        // Weighted stage chains reproduce the same operator.
        const ComplexMatrix ih = kron(ComplexMatrix::Identity(2, 2), reconstruct(h));
        ComplexMatrix sum = ComplexMatrix::Zero(ih.rows(), ih.cols());
        for (const auto& e : f.entries()) {
          sum += std::abs(e.gamma) * process_chain(ih, opt.n, e.u, e.w, TransferMap::sign_exponent(e.gamma));
        }
        worst_chain = std::max(worst_chain, max_abs(sum - g));
      }
    }
  }
  rep.metrics = {{"n", opt.n},
                 {"hamiltonians", opt.hamiltonians},
                 {"maps", maps.size()},
                 {"max_entry_error", worst},
                 {"max_chain_error", worst_chain},
                 {"tolerance", 1e-9}};
  rep.pass = worst <= 1e-9 && worst_chain <= 1e-9;
  return rep;
}

/// averaged_exact channel against e^{+i H0 t} for the negation map.
inline SuiteReport verify_error(const VerifyOptions& opt) {
  using namespace verify_detail;
  SuiteReport rep{"error"};
  rep.pass = true;
  const PauliSum h = demo_hamiltonian();
  const TransferMap f = build_negation(1);
  const ComplexMatrix target = expm_hermitian(reconstruct(h.traceless()), -1.0);
  auto rows = nlohmann::json::array();
  for (double eps : opt.epsilons) {
    SeedOracle oracle = SeedOracle::with_exact_range(h);
    RunConfig cfg;
    cfg.t = 1.0;
    cfg.epsilon = eps;
    cfg.mode = RunMode::averaged_exact;
    cfg.seed = opt.seed;
    ComplexVector psi = ComplexVector::Zero(2);
    psi(0) = 1.0;
    const RunResult r = run(oracle, f, psi, cfg);
    const double dist = choi_distance(*r.channel, unitary_channel(target));
    const bool ok = dist <= eps && r.report.ledger.queries() == r.report.iterations &&
                    std::abs(r.report.ledger.evolution_time() - r.report.beta * cfg.t) <= 1e-9;
    rep.pass = rep.pass && ok;
    rep.ledger.merge(oracle.ledger());
    rows.push_back({{"epsilon", eps}, {"N", r.report.iterations}, {"choi_distance", dist}, {"pass", ok}});
  }
  rep.metrics = {{"cases", rows}};
  return rep;
}

/// Trajectory variance against the 4 epsilon bound on Haar inputs with a
/// one-qubit reference.
inline SuiteReport verify_variance(const VerifyOptions& opt) {
  using namespace verify_detail;
  SuiteReport rep{"variance"};
  rep.pass = true;
  const PauliSum h = demo_hamiltonian();
  const TransferMap f = build_negation(1);
  const double eps = opt.variance_epsilon;
  const ChannelMatrix exact = unitary_channel(expm_hermitian(reconstruct(h.traceless()), -1.0));
  SeedOracle oracle = SeedOracle::with_exact_range(h);
  const std::uint64_t n_iter = iteration_count(f.beta(), 1.0, oracle.delta_h(), eps);
  const double tau = f.beta() / static_cast<double>(n_iter);
  auto rows = nlohmann::json::array();
  double worst_margin = -1e300;
  for (std::size_t i = 0; i < opt.inputs; ++i) {
    Rng state_rng = make_rng(opt.seed, kVarianceStream, i);
    const ComplexVector psi = haar_state(4, state_rng);
    std::vector<ComplexMatrix> outputs;
    outputs.reserve(opt.trajectories);
    for (std::size_t k = 0; k < opt.trajectories; ++k) {
      Rng rng = make_rng(derive_seed(opt.seed, kVarianceStream, i), kTrajectoryStream, k);
      const ComplexVector joint = run_trajectory_state(oracle, f, psi, tau, n_iter, rng, 2);
      outputs.push_back(trace_leading(joint * joint.adjoint(), 2));
    }
    const MeanEstimate m = empirical_variance(exact, outputs, psi, 2);
    const double bound = 4.0 * eps + 3.0 * m.standard_error;
    worst_margin = std::max(worst_margin, m.mean - bound);
    const bool ok = m.mean <= bound;
    rep.pass = rep.pass && ok;
    rows.push_back({{"input", i}, {"mean", m.mean}, {"standard_error", m.standard_error}, {"bound", bound}, {"pass", ok}});
  }
  rep.ledger = oracle.ledger();
  rep.metrics = {{"epsilon", eps}, {"N", n_iter}, {"trajectories", opt.trajectories}, {"inputs", rows},
                 {"worst_margin", worst_margin}};
  return rep;
}

/// One-step mixtures of the engine's own protocol: F_j = V_j (I (x) e^{-iH tau}) V_j^dagger
/// against e^{-i g_total(I (x) H) t / N}.
inline ChannelMixture engine_step_mixture(const PauliSum& h, const TransferMap& f, double tau, ComplexMatrix* target,
                                          double* beta_tau) {
  const ClassTMap g = classt_totals(f);
  const ComplexMatrix step = kron(ComplexMatrix::Identity(2, 2), expm_hermitian(reconstruct(h), tau));
  ChannelMixture mix;
  const auto p = g.probabilities();
  for (std::size_t j = 0; j < g.size(); ++j) {
    const ComplexMatrix& v = g.elements()[j].unitary;
    mix.emplace_back(p[j], unitary_channel(v * step * v.adjoint()));
  }
  if (target) {
    const ComplexMatrix gt = classt_apply(g, kron(ComplexMatrix::Identity(2, 2), reconstruct(h)));
    *target = expm_hermitian(gt, tau / g.total_weight());
  }
  if (beta_tau) {
    *beta_tau = g.total_weight() * tau;
  }
  return mix;
}

inline SuiteReport verify_theorem2(const VerifyOptions& opt) {
  using namespace verify_detail;
  SuiteReport rep{"theorem2"};
  rep.pass = true;
  std::size_t failures = 0;
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < opt.mixtures; ++k) {
    Rng rng = make_rng(opt.seed, kTheorem2Stream, k);
    const ComplexMatrix u = haar_unitary(2, rng);
    const std::size_t parts = 2 + static_cast<std::size_t>(uniform01(rng) * 4.0);
    std::vector<double> w(parts);
    double total = 0.0;
    for (auto& x : w) {
      x = 0.05 + uniform01(rng);
      total += x;
    }
    // Alternate between near-U mixtures and arbitrary ones.
    const double spread = (k % 2 == 0) ? 0.2 : 3.0;
    ChannelMixture mix;
    for (std::size_t j = 0; j < parts; ++j) {
      const ComplexMatrix kick = expm_hermitian(random_hermitian(2, rng), spread);
      mix.emplace_back(w[j] / total, unitary_channel(u * kick));
    }
    const Theorem2Report r = theorem2_check(u, mix, opt.states, rng);
    failures += r.satisfied ? 0 : 1;
    if (r.delta_pure > 0.0) {
      worst_ratio = std::max(worst_ratio, r.variance_sup / (2.0 * r.delta_pure));
    }
  }
  auto engine_rows = nlohmann::json::array();
  const PauliSum h = demo_hamiltonian();
  const TransferMap f = build_negation(1);
  const double delta = spectral_range(reconstruct(h));
  for (double eps : opt.epsilons) {
    const std::uint64_t n_iter = iteration_count(f.beta(), 1.0, delta, eps);
    const double tau = f.beta() / static_cast<double>(n_iter);
    ComplexMatrix target;
    const ChannelMixture mix = engine_step_mixture(h, f, tau, &target, nullptr);
    Rng rng = make_rng(opt.seed, kTheorem2Stream, 1'000'000 + engine_rows.size());
    const Theorem2Report r = theorem2_check(target, mix, opt.states, rng);
    failures += r.satisfied ? 0 : 1;
    engine_rows.push_back({{"epsilon", eps}, {"elements", mix.size()}, {"report", r}});
  }
  rep.pass = failures == 0;
  rep.metrics = {{"random_mixtures", opt.mixtures}, {"states", opt.states}, {"failures", failures},
                 {"max_variance_over_2delta", worst_ratio}, {"engine_mixtures", engine_rows}};
  return rep;
}

/// The error bound at N = iteration_count over a log-uniform grid.
inline SuiteReport verify_qdrift_bound(const VerifyOptions& opt) {
  using namespace verify_detail;
  SuiteReport rep{"qdrift-bound"};
  Rng rng = make_rng(opt.seed, kGridStream, 0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, uniform01(rng)); };
  double worst = 0.0;
  for (std::size_t k = 0; k < opt.grid; ++k) {
    const double beta = log_uniform(0.1, 100.0);
    const double t = log_uniform(1e-3, 100.0);
    const double dh = log_uniform(1e-3, 10.0);
    const double eps = log_uniform(1e-4, 0.5);
    const std::uint64_t n_iter = iteration_count(beta, t, dh, eps);
    const double bound = qdrift_error_bound(beta * dh, t, n_iter);
    worst = std::max(worst, bound / eps);
  }
  rep.pass = worst <= 1.0;
  rep.metrics = {{"points", opt.grid}, {"max_bound_over_epsilon", worst}, {"limit", 2.0 / 5.0 * std::exp(0.8)}};
  return rep;
}

/// Pauli twirl identity and the displayed intermediates of the stage chain.
inline SuiteReport verify_twirl(const VerifyOptions& opt) {
  using namespace verify_detail;
  SuiteReport rep{"twirl"};
  double worst_twirl = 0.0;
  for (std::size_t n = 1; n <= 2; ++n) {
    for (std::size_t k = 0; k < opt.matrices; ++k) {
      Rng rng = make_rng(opt.seed, kTwirlStream, 100 * n + k);
      const Eigen::Index d = Eigen::Index{1} << n;
      ComplexMatrix m(d, d);
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          m(i, j) = Complex(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0);
        }
      }
      const ComplexMatrix expect = (m.trace() / static_cast<double>(d)) * ComplexMatrix::Identity(d, d);
      worst_twirl = std::max(worst_twirl, max_abs(pauli_twirl(m) - expect));
    }
  }
  double worst_stage = 0.0;
  for (std::size_t n = 1; n <= 2; ++n) {
    for (std::size_t k = 0; k < 10; ++k) {
      Rng rng = make_rng(opt.seed, kTwirlStream, 10'000 + 100 * n + k);
      const PauliSum h = random_pauli_sum(n, rng);
      const Eigen::Index d = Eigen::Index{1} << n;
      const auto pick = [&] {
        return PauliIndexVector::from_index(n, 1 + static_cast<std::uint64_t>(uniform01(rng) * (num_words(n) - 1)));
      };
      const PauliIndexVector u = pick();
      const PauliIndexVector w = pick();
      const int s_f = uniform01(rng) < 0.5 ? 0 : 1;
      const ComplexMatrix hm = reconstruct(h);
      const ComplexMatrix id = ComplexMatrix::Identity(d, d);
      const ComplexMatrix zero = ComplexMatrix::Zero(d, d);
      const double alpha = h.coefficient(PauliIndexVector::identity(n));
      const double cu = h.coefficient(u);
      const ComplexMatrix h0 = hm - alpha * id;
      const ComplexMatrix su = pauli_matrix(u);
      const ComplexMatrix sw = pauli_matrix(w);
      const ComplexMatrix id2 = ComplexMatrix::Identity(2 * d, 2 * d);
      auto blocks = [&](const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c, const ComplexMatrix& e) {
        ComplexMatrix out(2 * d, 2 * d);
        out << a, b, c, e;
        return out;
      };
      const double sgn = s_f == 0 ? 1.0 : -1.0;
      const std::vector<ComplexMatrix> expected{
          blocks(h0, zero, zero, zero) + alpha * id2,
          blocks(h0, h0, h0, h0) + 2.0 * alpha * id2,
          blocks(h0, h0 * su, su * h0, su * h0 * su) + 2.0 * alpha * id2,
          blocks(zero, cu * id, cu * id, zero) + 2.0 * alpha * id2,
          cu * blocks(zero, sw, sw, zero) + 2.0 * alpha * id2,
          cu * blocks(sw, zero, zero, -sw) + 2.0 * alpha * id2,
          sgn * cu * blocks(sw, zero, zero, -sw) + 2.0 * alpha * id2,
      };
      ComplexMatrix x = kron(ComplexMatrix::Identity(2, 2), hm);
      for (int stage = 1; stage <= 7; ++stage) {
        x = process_stage(stage, x, n, u, w, s_f);
        worst_stage = std::max(worst_stage, max_abs(x - expected[static_cast<std::size_t>(stage - 1)]));
      }
    }
  }
  rep.pass = worst_twirl <= 1e-12 && worst_stage <= 1e-10;
  rep.metrics = {{"matrices_per_n", opt.matrices},
                 {"max_twirl_error", worst_twirl},
                 {"max_stage_error", worst_stage},
                 {"twirl_tolerance", 1e-12},
                 {"stage_tolerance", 1e-10}};
  return rep;
}

inline const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"lemma4", "error", "variance", "theorem2", "qdrift-bound", "twirl"};
  return names;
}

inline SuiteReport run_verify_suite(const std::string& name, const VerifyOptions& opt) {
  if (name == "lemma4") return verify_lemma4(opt);
  if (name == "error") return verify_error(opt);
  if (name == "variance") return verify_variance(opt);
  if (name == "theorem2") return verify_theorem2(opt);
  if (name == "qdrift-bound") return verify_qdrift_bound(opt);
  if (name == "twirl") return verify_twirl(opt);
  throw std::invalid_argument("unknown verify suite '" + name + "'");
}

}  // namespace hamxform
