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

// Randomized conjugated-evolution engine: turns forward-only queries to
// e^{-iH tau} into an approximation of e^{-i f(H) t} for a transfer map f.
//
// Register layout is [ancilla qubit][n system qubits][optional reference],
// the ancilla being the most significant factor. Each iteration draws
// j = (v, v', u, w), applies V_j^dagger, one oracle query of duration
// tau = t beta / N, then V_j, where
//
//   V_j = (X^{s_f} x I)(HAD x I)(C-sigma_w)(I x sigma_v')(C-sigma_u)(HAD x I)(C-sigma_v)
//
// and C-sigma = diag(I, sigma) is controlled on the ancilla.
//
// This header must not depend on whitebox.hpp.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hamxform/classt.hpp"
#include "hamxform/linalg.hpp"
#include "hamxform/pauli.hpp"
#include "hamxform/rng.hpp"
#include "hamxform/seed_oracle.hpp"
#include "hamxform/transfer_map.hpp"

namespace hamxform {

/// N = ceil(max(5 beta^2 t^2 Delta^2 / eps, (5/2) beta t Delta)), at least 1.
///
/// delta_h = 0 (a constant Hamiltonian) is accepted and gives N = 1.
inline std::uint64_t iteration_count(double beta, double t, double delta_h, double epsilon) {
  if (!(beta > 0.0) || !(t > 0.0) || !(epsilon > 0.0) || !(delta_h >= 0.0)) {
    throw std::invalid_argument("iteration_count: beta, t, epsilon must be positive and delta_H non-negative");
  }
  const double x = beta * t * delta_h;
  const double value = std::max(5.0 * x * x / epsilon, 2.5 * x);
  if (!std::isfinite(value) || value > 1e18) {
    throw std::overflow_error("iteration_count: iteration count too large");
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(value)));
}

// ---------------------------------------------------------------------------
// Gate sequences

struct ControlledPauli {
  PauliIndexVector word;
};
struct AncillaHadamard {};
struct SystemPauli {
  PauliIndexVector word;
};
struct AncillaXPower {
  int exponent = 0;
};

using GateLayer = std::variant<ControlledPauli, AncillaHadamard, SystemPauli, AncillaXPower>;

/// Clifford layers on ancilla (x) system, stored in application order.
class GateSequence {
 public:
  GateSequence(std::size_t n, std::vector<GateLayer> layers) : n_(n), layers_(std::move(layers)) {}

  std::size_t num_qubits() const { return n_; }
  const std::vector<GateLayer>& layers() const { return layers_; }

  static ComplexMatrix layer_matrix(std::size_t n, const GateLayer& layer) {
    const Eigen::Index d = Eigen::Index{1} << n;
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    ComplexMatrix p1 = ComplexMatrix::Zero(2, 2);
    p1(1, 1) = 1.0;
    return std::visit(
        [&](const auto& g) -> ComplexMatrix {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, ControlledPauli>) {
            return kron(p0, id) + kron(p1, pauli_matrix(g.word));
          } else if constexpr (std::is_same_v<T, AncillaHadamard>) {
            ComplexMatrix had(2, 2);
            had << 1.0, 1.0, 1.0, -1.0;
            return kron(had / std::sqrt(2.0), id);
          } else if constexpr (std::is_same_v<T, SystemPauli>) {
            return kron(ComplexMatrix::Identity(2, 2), pauli_matrix(g.word));
          } else {
            return kron(g.exponent ? single_qubit_pauli(1) : single_qubit_pauli(0), id);
          }
        },
        layer);
  }

  /// Dense unitary on 2^{n+1} dims: last layer leftmost.
  ComplexMatrix matrix() const {
    const Eigen::Index dd = Eigen::Index{2} << n_;
    ComplexMatrix m = ComplexMatrix::Identity(dd, dd);
    for (const auto& layer : layers_) {
      m = (layer_matrix(n_, layer) * m).eval();
    }
    return m;
  }

 private:
  std::size_t n_;
  std::vector<GateLayer> layers_;
};

/// V_{f,j} for j = (v, v', u, w).
inline GateSequence build_gate_sequence(const PauliIndexVector& v, const PauliIndexVector& v_prime,
                                        const PauliIndexVector& u, const PauliIndexVector& w, int s_f) {
  const std::size_t n = v.size();
  if (v_prime.size() != n || u.size() != n || w.size() != n) {
    throw std::invalid_argument("build_gate_sequence: index vectors have different lengths");
  }
  if (s_f != 0 && s_f != 1) {
    throw std::invalid_argument("build_gate_sequence: s_f must be 0 or 1");
  }
  return GateSequence(n, {ControlledPauli{v}, AncillaHadamard{}, ControlledPauli{u}, SystemPauli{v_prime},
                          ControlledPauli{w}, AncillaHadamard{}, AncillaXPower{s_f}});
}

// ---------------------------------------------------------------------------
// Run configuration and results

enum class RunMode { trajectory, averaged_exact, averaged_monte_carlo };

inline std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::trajectory:
      return "trajectory";
    case RunMode::averaged_exact:
      return "averaged_exact";
    case RunMode::averaged_monte_carlo:
      return "averaged_monte_carlo";
  }
  return "unknown";
}

inline RunMode run_mode_from_string(const std::string& s) {
  if (s == "trajectory") return RunMode::trajectory;
  if (s == "averaged_exact") return RunMode::averaged_exact;
  if (s == "averaged_monte_carlo") return RunMode::averaged_monte_carlo;
  throw std::invalid_argument("unknown run mode '" + s + "'");
}

struct RunConfig {
  double t = 1.0;
  double epsilon = 0.1;
  RunMode mode = RunMode::trajectory;
  std::uint64_t seed = 0;
  std::uint64_t sample_count = 1;
  std::uint64_t enumeration_budget = 10'000'000;
  unsigned threads = 1;

  void validate() const {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("RunConfig: t must be positive");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw std::invalid_argument("RunConfig: epsilon must be positive");
    }
    if (mode == RunMode::averaged_monte_carlo && sample_count == 0) {
      throw std::invalid_argument("RunConfig: sample_count must be positive");
    }
  }
};

struct RunReport {
  std::uint64_t iterations = 0;  // N
  double beta = 0.0;
  double tau = 0.0;
  RunMode mode = RunMode::trajectory;
  std::uint64_t seed = 0;
  std::uint64_t instances = 1;
  Ledger ledger;        // one algorithm instance
  Ledger total_ledger;  // everything this call charged
};

inline void to_json(nlohmann::json& j, const RunReport& r) {
  j = {{"N", r.iterations},      {"beta", r.beta},   {"tau", r.tau},       {"mode", to_string(r.mode)},
       {"seed", r.seed},         {"instances", r.instances}, {"ledger", r.ledger}, {"total_ledger", r.total_ledger}};
}

struct RunResult {
  DensityMatrix state;                  // output on system (x) reference
  std::optional<ChannelMatrix> channel;  // system channel, averaged_exact only
  RunReport report;
};

inline constexpr std::uint64_t kTrajectoryStream = 0x7472616a;  // "traj"

namespace detail {

/// In-place Clifford layers on a [ancilla][system][reference] state vector.
/// Nonzero template arguments fix the system and reference dimensions at
/// compile time; zero means runtime-sized.
template <int SysDim = 0, int RefDim = 0>
class ConjugationKernel {
 public:
  ConjugationKernel(std::size_t n, Eigen::Index ref_dim)
      : n_(n), sys_dim_(Eigen::Index{1} << n), ref_dim_(ref_dim) {
    if (n > 8) {
      throw std::invalid_argument("trajectory simulation supports at most 8 system qubits");
    }
    if ((SysDim != 0 && SysDim != sys_dim_) || (RefDim != 0 && RefDim != ref_dim_)) {
      throw std::logic_error("ConjugationKernel: dimension does not match the fixed specialization");
    }
    // Flat monomial table over all words: sigma_w |s> = phase[w][s] |s ^ flip[w]>.
    const std::uint64_t words = num_words(n);
    flips_.resize(words);
    phases_.resize(words * static_cast<std::uint64_t>(sys_dim_));
    for (std::uint64_t w = 0; w < words; ++w) {
      const PauliAction a(PauliIndexVector::from_index(n, w));
      flips_[w] = a.flip;
      std::copy(a.phase.begin(), a.phase.end(), phases_.begin() + static_cast<std::ptrdiff_t>(w * a.dim()));
    }
  }

  Eigen::Index sys() const {
    if constexpr (SysDim != 0) return SysDim;
    return sys_dim_;
  }
  Eigen::Index ref() const {
    if constexpr (RefDim != 0) return RefDim;
    return ref_dim_;
  }
  Eigen::Index half() const { return sys() * ref(); }
  Eigen::Index joint_dim() const { return 2 * half(); }

  void pauli_on_half(Complex* x, std::uint64_t word) const {
    if (word == 0) {
      return;
    }
    const std::uint64_t flip = flips_[word];
    const Eigen::Index d = sys();
    const Eigen::Index r_dim = ref();
    const Complex* phase = phases_.data() + word * static_cast<std::uint64_t>(d);
    if (flip == 0) {
      for (Eigen::Index s = 0; s < d; ++s) {
        for (Eigen::Index r = 0; r < r_dim; ++r) {
          x[s * r_dim + r] = cmul(phase[s], x[s * r_dim + r]);
        }
      }
      return;
    }
    for (Eigen::Index s = 0; s < d; ++s) {
      const auto t = static_cast<Eigen::Index>(static_cast<std::uint64_t>(s) ^ flip);
      if (t < s) {
        continue;
      }
      const Complex ps = phase[s];
      const Complex pt = phase[t];
      Complex* xs = x + s * r_dim;
      Complex* xt = x + t * r_dim;
      for (Eigen::Index r = 0; r < r_dim; ++r) {
        const Complex old_s = xs[r];
        xs[r] = cmul(pt, xt[r]);
        xt[r] = cmul(ps, old_s);
      }
    }
  }

  void controlled(Complex* psi, std::uint64_t word) const { pauli_on_half(psi + half(), word); }

  void system(Complex* psi, std::uint64_t word) const {
    pauli_on_half(psi, word);
    pauli_on_half(psi + half(), word);
  }

  void hadamard(Complex* psi) const {
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    const Eigen::Index h = half();
    for (Eigen::Index k = 0; k < h; ++k) {
      const Complex a = psi[k];
      const Complex b = psi[k + h];
      psi[k] = (a + b) * kInvSqrt2;
      psi[k + h] = (a - b) * kInvSqrt2;
    }
  }

  void x_power(Complex* psi, int s) const {
    if (s) {
      std::swap_ranges(psi, psi + half(), psi + half());
    }
  }

  void apply_v(Complex* psi, std::uint64_t v, std::uint64_t vp, std::uint64_t u, std::uint64_t w, int s) const {
    controlled(psi, v);
    hadamard(psi);
    controlled(psi, u);
    system(psi, vp);
    controlled(psi, w);
    hadamard(psi);
    x_power(psi, s);
  }

  void apply_v_dagger(Complex* psi, std::uint64_t v, std::uint64_t vp, std::uint64_t u, std::uint64_t w, int s) const {
    x_power(psi, s);
    hadamard(psi);
    controlled(psi, w);
    system(psi, vp);
    controlled(psi, u);
    hadamard(psi);
    controlled(psi, v);
  }

 private:
  std::size_t n_;
  Eigen::Index sys_dim_;
  Eigen::Index ref_dim_;
  std::vector<std::uint64_t> flips_;
  std::vector<Complex> phases_;
};

struct CompiledEntry {
  std::uint64_t u;
  std::uint64_t w;
  int s_f;
};

inline std::vector<CompiledEntry> compile_entries(const TransferMap& f) {
  std::vector<CompiledEntry> out;
  out.reserve(f.size());
  for (const auto& e : f.entries()) {
    out.push_back({e.u.index(), e.w.index(), TransferMap::sign_exponent(e.gamma)});
  }
  return out;
}

inline void check_dims(const SeedOracle& oracle, const TransferMap& f) {
  if (oracle.num_qubits() != f.num_qubits()) {
    throw std::invalid_argument("run: oracle has " + std::to_string(oracle.num_qubits()) +
                                " qubits but the transfer map has " + std::to_string(f.num_qubits()));
  }
}

}  // namespace detail

namespace detail {

template <int SysDim, int RefDim>
void trajectory_loop(SeedOracle& oracle, const TransferMap& f, ComplexVector& psi, double tau,
                     std::uint64_t iterations, Rng& rng, Eigen::Index ref_dim) {
  const std::size_t n = f.num_qubits();
  const ConjugationKernel<SysDim, RefDim> kernel(n, ref_dim);
  const auto entries = compile_entries(f);
  const std::uint64_t word_mask = num_words(n) - 1;
  const unsigned shift = static_cast<unsigned>(2 * n);
  const SubsystemLayout layout{2, ref_dim};
  std::span<Complex> view(psi.data(), static_cast<std::size_t>(psi.size()));
  for (std::uint64_t m = 0; m < iterations; ++m) {
    // (v, v') uniform over 16^n: 2n independent base-4 digits.
    const std::uint64_t bits = rng();
    const std::uint64_t v = bits & word_mask;
    const std::uint64_t vp = (bits >> shift) & word_mask;
    const auto& e = entries[f.sample_index(rng)];
    kernel.apply_v_dagger(psi.data(), v, vp, e.u, e.w, e.s_f);
    if constexpr (SysDim != 0 && RefDim == 1) {
      oracle.template evolve_fixed<SysDim>(psi.data(), tau, 2);
    } else {
      oracle.evolve(view, tau, layout);
    }
    kernel.apply_v(psi.data(), v, vp, e.u, e.w, e.s_f);
  }
}

}  // namespace detail

/// One random instance: N iterations starting from |0> (x) psi, returning
/// the final pure state on ancilla (x) system (x) reference.
inline ComplexVector run_trajectory_state(SeedOracle& oracle, const TransferMap& f, const ComplexVector& psi_in,
                                          double tau, std::uint64_t iterations, Rng& rng, Eigen::Index ref_dim = 1) {
  detail::check_dims(oracle, f);
  const std::size_t n = f.num_qubits();
  const Eigen::Index half = (Eigen::Index{1} << n) * ref_dim;
  if (ref_dim < 1 || psi_in.size() != half) {
    throw std::invalid_argument("run: input state dimension does not match system and reference");
  }
  ComplexVector psi = ComplexVector::Zero(2 * half);
  psi.head(half) = psi_in;
  // Small fixed shapes get fully unrolled kernels.
  if (n == 1 && ref_dim == 1) {
    detail::trajectory_loop<2, 1>(oracle, f, psi, tau, iterations, rng, ref_dim);
  } else if (n == 1 && ref_dim == 2) {
    detail::trajectory_loop<2, 2>(oracle, f, psi, tau, iterations, rng, ref_dim);
  } else if (n == 2 && ref_dim == 1) {
    detail::trajectory_loop<4, 1>(oracle, f, psi, tau, iterations, rng, ref_dim);
  } else {
    detail::trajectory_loop<0, 0>(oracle, f, psi, tau, iterations, rng, ref_dim);
  }
  return psi;
}

/// Sum over j of p_j V_j (oracle query) V_j^dagger as a joint-space channel,
/// enumerated in lexicographic (v, v', entry) order. The oracle is charged
/// `uses` queries of duration tau.
inline ChannelMatrix averaged_step_channel(SeedOracle& oracle, const TransferMap& f, double tau, std::uint64_t uses,
                                           std::uint64_t enumeration_budget = 10'000'000) {
  detail::check_dims(oracle, f);
  const std::size_t n = f.num_qubits();
  const double terms = std::pow(16.0, static_cast<double>(n)) * static_cast<double>(f.size());
  if (terms > static_cast<double>(enumeration_budget)) {
    throw std::length_error("averaged_exact: 16^n * |entries| = " + std::to_string(terms) +
                            " exceeds the enumeration budget " + std::to_string(enumeration_budget));
  }
  const ChannelMatrix query = oracle.evolution_channel(tau, SubsystemLayout{2, 1}, uses);
  const Eigen::Index dd = Eigen::Index{2} << n;
  const Eigen::Index sd = dd * dd;
  const auto words = all_words(n);
  const double p1 = 1.0 / std::pow(16.0, static_cast<double>(n));

  ComplexMatrix acc = ComplexMatrix::Zero(sd, sd);
  ComplexMatrix tmp(sd, sd);
  for (const auto& v : words) {
    for (const auto& vp : words) {
      for (std::size_t k = 0; k < f.size(); ++k) {
        const auto& e = f.entries()[k];
        const ComplexMatrix vm =
            build_gate_sequence(v, vp, e.u, e.w, TransferMap::sign_exponent(e.gamma)).matrix();
        const ComplexMatrix conj_v = kron(vm.conjugate(), vm);
        const ComplexMatrix conj_vd = kron(vm.transpose(), vm.adjoint());
        tmp.noalias() = query.super() * conj_vd;
        acc.noalias() += (p1 * f.probability(k)) * (conj_v * tmp);
      }
    }
  }
  return ChannelMatrix(std::move(acc), dd, dd);
}

namespace detail {

inline DensityMatrix reduce_to_system(const ComplexVector& joint) {
  const ComplexMatrix rho = joint * joint.adjoint();
  ComplexMatrix sys = trace_leading(rho, 2);
  sys = 0.5 * (sys + sys.adjoint()).eval();
  return DensityMatrix(std::move(sys));
}

inline ComplexMatrix hermitize(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

/// Channel powers drift the trace by rounding; rescale small drift, reject real loss.
inline ComplexMatrix normalize_output(const ComplexMatrix& m) {
  const ComplexMatrix h = hermitize(m);
  const double tr = h.trace().real();
  if (!(std::abs(tr - 1.0) <= 1e-6)) {
    throw std::runtime_error("run: output trace " + std::to_string(tr) + " is not 1");
  }
  return h / tr;
}

}  // namespace detail

/// Runs the randomized algorithm for e^{-i f(H) t} on psi_in (system (x)
/// reference, reference dimension `ref_dim`).
inline RunResult run(SeedOracle& oracle, const TransferMap& f, const ComplexVector& psi_in, const RunConfig& config,
                     Eigen::Index ref_dim = 1) {
  config.validate();
  detail::check_dims(oracle, f);
  if (ref_dim < 1 || psi_in.size() != oracle.dim() * ref_dim) {
    throw std::invalid_argument("run: input state dimension does not match the oracle");
  }
  if (std::abs(psi_in.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("run: input state is not normalized");
  }
  const double beta = f.beta();
  const std::uint64_t iterations = iteration_count(beta, config.t, oracle.delta_h(), config.epsilon);
  const double tau = config.t * beta / static_cast<double>(iterations);

  RunReport report;
  report.iterations = iterations;
  report.beta = beta;
  report.tau = tau;
  report.mode = config.mode;
  report.seed = config.seed;
  const Ledger before = oracle.ledger();

  switch (config.mode) {
    case RunMode::trajectory: {
      Rng rng = make_rng(config.seed, kTrajectoryStream, 0);
      const ComplexVector joint = run_trajectory_state(oracle, f, psi_in, tau, iterations, rng, ref_dim);
      report.total_ledger = oracle.ledger().since(before);
      report.ledger = report.total_ledger;
      return {detail::reduce_to_system(joint), std::nullopt, report};
    }
    case RunMode::averaged_monte_carlo: {
      const std::uint64_t samples = config.sample_count;
      const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(samples)));
      std::vector<ComplexVector> finals(samples);
      std::vector<Ledger> ledgers(samples);
      std::vector<SeedOracle> workers(threads, oracle);
      auto work = [&](unsigned tid) {
        for (std::uint64_t k = tid; k < samples; k += threads) {
          Rng rng = make_rng(config.seed, kTrajectoryStream, k);
          workers[tid].reset_ledger();
          finals[k] = run_trajectory_state(workers[tid], f, psi_in, tau, iterations, rng, ref_dim);
          ledgers[k] = workers[tid].ledger();
        }
      };
      if (threads == 1) {
        work(0);
      } else {
        std::vector<std::thread> pool;
        for (unsigned tid = 0; tid < threads; ++tid) {
          pool.emplace_back(work, tid);
        }
        for (auto& th : pool) {
          th.join();
        }
      }
      // Canonical index order keeps the totals independent of the thread count.
      for (const auto& l : ledgers) {
        oracle.absorb_ledger(l);
      }
      ComplexMatrix avg = ComplexMatrix::Zero(psi_in.size(), psi_in.size());
      for (const auto& joint : finals) {
        avg += trace_leading(joint * joint.adjoint(), 2);
      }
      avg /= static_cast<double>(samples);
      report.instances = samples;
      report.total_ledger = oracle.ledger().since(before);
      report.ledger = Ledger{};
      report.ledger.charge(iterations, tau);
      return {DensityMatrix(detail::normalize_output(avg)), std::nullopt, report};
    }
    case RunMode::averaged_exact: {
      const Eigen::Index d = oracle.dim();
      const ChannelMatrix step = averaged_step_channel(oracle, f, tau, iterations, config.enumeration_budget);
      const ChannelMatrix joint = channel_power(step, iterations);
      const ChannelMatrix sys = compose(trace_out_ancilla(d), compose(joint, prepare_ancilla_zero(d)));
      const ComplexMatrix rho_in = psi_in * psi_in.adjoint();
      ComplexMatrix out = sys.apply_with_reference(rho_in, ref_dim);
      report.total_ledger = oracle.ledger().since(before);
      report.ledger = report.total_ledger;
      return {DensityMatrix(detail::normalize_output(out)), sys, report};
    }
  }
  throw std::logic_error("run: unhandled mode");
}

/// Class-T specification {(h_j = beta p_j, V_{f,j})} on ancilla (x) system.
inline ClassTMap classt_totals(const TransferMap& f, std::uint64_t enumeration_budget = 10'000'000) {
  const std::size_t n = f.num_qubits();
  const double terms = std::pow(16.0, static_cast<double>(n)) * static_cast<double>(f.size());
  if (terms > static_cast<double>(enumeration_budget)) {
    throw std::length_error("classt_totals: 16^n * |entries| exceeds the enumeration budget");
  }
  const auto words = all_words(n);
  const double p1 = 1.0 / std::pow(16.0, static_cast<double>(n));
  std::vector<ClassTMap::Element> out;
  out.reserve(static_cast<std::size_t>(terms));
  for (const auto& v : words) {
    for (const auto& vp : words) {
      for (std::size_t k = 0; k < f.size(); ++k) {
        const auto& e = f.entries()[k];
        out.push_back({f.beta() * p1 * f.probability(k),
                       build_gate_sequence(v, vp, e.u, e.w, TransferMap::sign_exponent(e.gamma)).matrix()});
      }
    }
  }
  return ClassTMap(std::move(out));
}

}  // namespace hamxform
