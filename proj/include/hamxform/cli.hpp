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

// Commands behind the `hamxform` tool. Each takes a parsed JSON config and
// returns a result document; exit codes are 0 (pass), 1 (a checked bound
// failed) and 2 (bad usage or config).
//
// Seeds: the master seed comes from --seed, else config "seed", else 0.
// Per-component streams are derive_seed(master, stream, index) (splitmix64).

#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamxform/block_encoding.hpp"
#include "hamxform/engine.hpp"
#include "hamxform/learning.hpp"
#include "hamxform/linalg.hpp"
#include "hamxform/pauli.hpp"
#include "hamxform/reference.hpp"
#include "hamxform/seed_oracle.hpp"
#include "hamxform/transfer_map.hpp"
#include "hamxform/verify.hpp"

namespace hamxform::cli {

inline constexpr int kConfigVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitBoundFailure = 1, kExitUsage = 2 };

/// Bad usage or a config that fails validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

struct CommandResult {
  nlohmann::json document;
  std::string csv;  // filled by commands with a native table
  int exit_code = kExitOk;
};

inline constexpr std::uint64_t kLearnStream = 0x6c726e;
inline constexpr std::uint64_t kStateStream = 0x737461;

// ---------------------------------------------------------------------------
// Config helpers

inline void require_version(const nlohmann::json& config) {
  if (!config.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  if (!config.contains("version")) {
    throw ConfigError("config: missing required field 'version'");
  }
  if (!config.at("version").is_number_integer() || config.at("version").get<int>() != kConfigVersion) {
    throw ConfigError("config: unsupported version (expected 1)");
  }
}

inline const nlohmann::json& require(const nlohmann::json& config, const std::string& key) {
  if (!config.contains(key)) {
    throw ConfigError("config: missing required field '" + key + "'");
  }
  return config.at(key);
}

template <class T>
T get_or(const nlohmann::json& config, const std::string& key, T fallback) {
  if (!config.contains(key)) {
    return fallback;
  }
  try {
    return config.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: field '" + key + "' has the wrong type");
  }
}

inline double require_number(const nlohmann::json& config, const std::string& key) {
  const auto& v = require(config, key);
  if (!v.is_number()) {
    throw ConfigError("config: field '" + key + "' must be a number");
  }
  return v.get<double>();
}

inline std::uint64_t master_seed(const nlohmann::json& config, const CommandOptions& opt) {
  if (opt.seed) {
    return *opt.seed;
  }
  return get_or<std::uint64_t>(config, "seed", 0);
}

inline PauliSum parse_hamiltonian(const nlohmann::json& j) {
  try {
    return j.get<PauliSum>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: malformed hamiltonian: ") + e.what());
  }
}

inline SeedOracle parse_oracle(const nlohmann::json& config) {
  PauliSum h = parse_hamiltonian(require(config, "hamiltonian"));
  if (config.contains("delta_h")) {
    return SeedOracle(std::move(h), require_number(config, "delta_h"));
  }
  return SeedOracle::with_exact_range(std::move(h));
}

inline std::optional<std::vector<PauliIndexVector>> parse_support(const nlohmann::json& m) {
  if (!m.contains("support")) {
    return std::nullopt;
  }
  return m.at("support").get<std::vector<PauliIndexVector>>();
}

/// {"kind": negation | transpose | filter | hprime | neg_hprime | explicit, ...}
inline TransferMap parse_map(const nlohmann::json& m, std::size_t n) {
  const std::string kind = require(m, "kind").get<std::string>();
  if (kind == "negation") return build_negation(n, parse_support(m));
  if (kind == "transpose") return build_transpose(n, parse_support(m));
  if (kind == "filter") return build_filter(n, require(m, "v").get<PauliIndexVector>());
  if (kind == "hprime") return build_hprime_map(n);
  if (kind == "neg_hprime") return build_neg_hprime_map(n);
  if (kind == "explicit") {
    nlohmann::json j = {{"n", n}, {"entries", require(m, "entries")}};
    return transfer_map_from_json(j);
  }
  throw ConfigError("config: unknown map kind '" + kind + "'");
}

inline ComplexVector parse_state(const nlohmann::json& config, Eigen::Index dim) {
  if (!config.contains("psi")) {
    ComplexVector psi = ComplexVector::Zero(dim);
    psi(0) = 1.0;
    return psi;
  }
  ComplexVector psi = vector_from_json(config.at("psi"));
  if (psi.size() != dim) {
    throw ConfigError("config: psi has dimension " + std::to_string(psi.size()) + ", expected " +
                      std::to_string(dim));
  }
  const double norm = psi.norm();
  if (!(norm > 0.0)) {
    throw ConfigError("config: psi must be non-zero");
  }
  return psi / norm;
}

inline RunConfig parse_run_config(const nlohmann::json& config, std::uint64_t seed, unsigned threads) {
  RunConfig rc;
  rc.t = require_number(config, "t");
  rc.epsilon = require_number(config, "epsilon");
  rc.mode = run_mode_from_string(get_or<std::string>(config, "mode", "averaged_exact"));
  rc.seed = seed;
  rc.sample_count = get_or<std::uint64_t>(config, "sample_count", 100);
  rc.enumeration_budget = get_or<std::uint64_t>(config, "enumeration_budget", 10'000'000);
  rc.threads = threads;
  return rc;
}

inline nlohmann::json envelope(const std::string& command, const nlohmann::json& config, std::uint64_t seed) {
  return {{"version", kConfigVersion}, {"command", command}, {"config_echo", config}, {"seed", seed},
          {"metrics", nlohmann::json::object()}, {"ledger", Ledger{}}, {"pass", true}};
}

inline double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) { return 0.5 * trace_norm(a - b); }

// ---------------------------------------------------------------------------
// Commands

inline CommandResult cmd_transform(const nlohmann::json& config, const CommandOptions& opt = {}) {
  require_version(config);
  const std::uint64_t seed = master_seed(config, opt);
  SeedOracle oracle = parse_oracle(config);
  const TransferMap f = parse_map(require(config, "map"), oracle.num_qubits());
  const ComplexVector psi = parse_state(config, oracle.dim());
  const RunConfig rc = parse_run_config(config, seed, opt.threads);

  const RunResult r = run(oracle, f, psi, rc);
  const ComplexMatrix target_u = exact_transformed_evolution(WhiteBox::hamiltonian(oracle), f, rc.t);
  const ComplexVector ideal = target_u * psi;
  const double state_distance = trace_distance(r.state.matrix(), ideal * ideal.adjoint());

  CommandResult out;
  out.document = envelope("transform", config, seed);
  auto& metrics = out.document["metrics"];
  metrics = {{"report", r.report}, {"trace_distance", state_distance}, {"epsilon", rc.epsilon}};
  const double expected_time = r.report.beta * rc.t * static_cast<double>(r.report.instances);
  bool pass = r.report.total_ledger.queries() == r.report.iterations * r.report.instances &&
              std::abs(r.report.total_ledger.evolution_time() - expected_time) <= 1e-9 * std::max(1.0, expected_time);
  if (r.channel) {
    const double dist = choi_distance(*r.channel, unitary_channel(target_u));
    metrics["choi_distance"] = dist;
    pass = pass && dist <= rc.epsilon;
  }
  metrics["output_state"] = matrix_to_json(r.state.matrix());
  out.document["ledger"] = r.report.total_ledger;
  out.document["pass"] = pass;
  out.exit_code = pass ? kExitOk : kExitBoundFailure;
  return out;
}

inline VerifyOptions parse_verify_options(const nlohmann::json& config, std::uint64_t seed) {
  VerifyOptions v;
  v.seed = seed;
  v.n = get_or<std::size_t>(config, "n", v.n);
  v.hamiltonians = get_or<std::size_t>(config, "hamiltonians", v.hamiltonians);
  v.trajectories = get_or<std::size_t>(config, "trajectories", v.trajectories);
  v.inputs = get_or<std::size_t>(config, "inputs", v.inputs);
  v.mixtures = get_or<std::size_t>(config, "mixtures", v.mixtures);
  v.states = get_or<std::size_t>(config, "states", v.states);
  v.grid = get_or<std::size_t>(config, "grid", v.grid);
  v.matrices = get_or<std::size_t>(config, "matrices", v.matrices);
  v.epsilons = get_or<std::vector<double>>(config, "epsilons", v.epsilons);
  v.variance_epsilon = get_or<double>(config, "variance_epsilon", v.variance_epsilon);
  return v;
}

/// `config` may be empty (null) when only flags are given.
inline CommandResult cmd_verify(const std::string& suite, const nlohmann::json& config, const CommandOptions& opt = {}) {
  const auto& names = verify_suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw ConfigError("unknown verify suite '" + suite + "'");
  }
  nlohmann::json cfg = config.is_null() ? nlohmann::json{{"version", kConfigVersion}} : config;
  require_version(cfg);
  cfg["suite"] = suite;
  const std::uint64_t seed = master_seed(cfg, opt);
  const SuiteReport rep = run_verify_suite(suite, parse_verify_options(cfg, seed));
  CommandResult out;
  out.document = envelope("verify", cfg, seed);
  out.document["metrics"] = rep.metrics;
  out.document["ledger"] = rep.ledger;
  out.document["pass"] = rep.pass;
  out.exit_code = rep.pass ? kExitOk : kExitBoundFailure;
  return out;
}

inline CommandResult cmd_learn(const nlohmann::json& config, const CommandOptions& opt = {}) {
  require_version(config);
  const std::uint64_t seed = master_seed(config, opt);
  SeedOracle oracle = parse_oracle(config);
  const PauliIndexVector v = require(config, "v").get<PauliIndexVector>();
  const double eps_sim = get_or<double>(config, "epsilon_sim", kDefaultSimulationError);
  const std::optional<double> delta_sup =
      config.contains("delta_sup") ? std::optional<double>(require_number(config, "delta_sup")) : std::nullopt;
  const double s = require_number(config, "s");
  const std::size_t runs = get_or<std::size_t>(config, "runs", 1);
  if (runs == 0) {
    throw ConfigError("config: runs must be positive");
  }
  const RpeSchedule schedule = rpe_schedule(s, delta_sup.value_or(eps_sim));

  CommandResult out;
  out.document = envelope("learn", config, seed);
  auto& metrics = out.document["metrics"];
  bool pass = true;

  std::vector<double> estimates;
  nlohmann::json first_stages;
  for (std::size_t k = 0; k < runs; ++k) {
    Rng rng = make_rng(seed, kLearnStream, k);
    const Ledger before = oracle.ledger();
    const RpeResult r = estimate_parameter(oracle, v, s, rng, eps_sim, delta_sup);
    const Ledger used = oracle.ledger().since(before);
    pass = pass && std::abs(used.evolution_time() - schedule.total_evolution_time()) <=
                       1e-9 * schedule.total_evolution_time();
    estimates.push_back(r.estimate);
    if (k == 0) {
      first_stages = r.stages;
    }
  }
  metrics["schedule"] = schedule;
  metrics["estimate"] = median(estimates);
  metrics["estimates"] = estimates;
  metrics["stages"] = first_stages;
  metrics["evolution_time_per_run"] = schedule.total_evolution_time();

  std::ostringstream csv;
  csv.precision(17);
  if (config.contains("sweep")) {
    const auto sweep = config.at("sweep").get<std::vector<double>>();
    auto rows = nlohmann::json::array();
    csv << "s,K,F,shots,total_evolution_time,estimate\n";
    for (std::size_t k = 0; k < sweep.size(); ++k) {
      Rng rng = make_rng(seed, kLearnStream, 1'000'000 + k);
      const RpeSchedule sch = rpe_schedule(sweep[k], delta_sup.value_or(eps_sim));
      const Ledger before = oracle.ledger();
      const RpeResult r = estimate_parameter(oracle, v, sweep[k], rng, eps_sim, delta_sup);
      const double used = oracle.ledger().since(before).evolution_time();
      pass = pass && std::abs(used - sch.total_evolution_time()) <= 1e-9 * sch.total_evolution_time();
      rows.push_back({{"s", sweep[k]}, {"K", sch.K}, {"F", sch.F}, {"shots", sch.total_shots()},
                      {"total_evolution_time", used}, {"estimate", r.estimate}});
      csv << sweep[k] << ',' << sch.K << ',' << sch.F << ',' << sch.total_shots() << ',' << used << ','
          << r.estimate << '\n';
    }
    metrics["sweep"] = rows;
  } else {
    csv << "run,estimate\n";
    for (std::size_t k = 0; k < estimates.size(); ++k) {
      csv << k << ',' << estimates[k] << '\n';
    }
  }
  out.csv = csv.str();
  out.document["ledger"] = oracle.ledger();
  out.document["pass"] = pass;
  out.exit_code = pass ? kExitOk : kExitBoundFailure;
  return out;
}

inline CommandResult cmd_block_encode(const nlohmann::json& config, const CommandOptions& opt = {}) {
  require_version(config);
  const std::uint64_t seed = master_seed(config, opt);
  const BlockHamiltonian block = block_hamiltonian_from_json(config);
  const std::string sign_str = get_or<std::string>(config, "sign", "-");
  if (sign_str != "+" && sign_str != "-") {
    throw ConfigError("config: sign must be \"+\" or \"-\"");
  }
  const char sign = sign_str[0];
  SeedOracle oracle = config.contains("delta_h")
                          ? SeedOracle(block.pauli(), require_number(config, "delta_h"))
                          : SeedOracle::with_exact_range(block.pauli());
  const ComplexVector psi = parse_state(config, oracle.dim());
  const RunConfig rc = parse_run_config(config, seed, opt.threads);
  const double c = get_or<double>(config, "qsvt_constant", 1.0);

  const BlockSimulation sim = simulate_hprime_evolution(oracle, sign, psi, rc, block);
  const ComplexVector ideal = sim.target * psi;

  CommandResult out;
  out.document = envelope("block-encode", config, seed);
  auto& metrics = out.document["metrics"];
  const std::uint64_t d = qsvt_query_budget(rc.epsilon, block.lambda_min(), c);
  metrics = {{"n", block.num_qubits()},
             {"sign", sign_str},
             {"lambda_min", block.lambda_min()},
             {"report", sim.run.report},
             {"trace_distance", trace_distance(sim.run.state.matrix(), ideal * ideal.adjoint())},
             {"qsvt_query_budget", d},
             {"qsvt_error_total", qsvt_error_total(rc.epsilon, d)},
             {"classt_total_weight", (sim.map.beta() + 1.0) / 2.0}};
  bool pass = std::abs(sim.run.report.ledger.evolution_time() - sim.map.beta() * rc.t) <= 1e-9 * sim.map.beta() * rc.t;
  if (sim.run.channel) {
    const double dist = choi_distance(*sim.run.channel, unitary_channel(sim.target));
    metrics["choi_distance"] = dist;
    pass = pass && dist <= rc.epsilon;
  }
  out.document["ledger"] = sim.run.report.total_ledger;
  out.document["pass"] = pass;
  out.exit_code = pass ? kExitOk : kExitBoundFailure;
  return out;
}

// ---------------------------------------------------------------------------
// Output

namespace detail {

inline void flatten(const nlohmann::json& j, const std::string& prefix, std::ostringstream& os) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      flatten(v, prefix.empty() ? k : prefix + "." + k, os);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], prefix + "." + std::to_string(i), os);
    }
  } else {
    os << prefix << ',' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

}  // namespace detail

/// CSV view: the command's own table when it has one, else key,value rows
/// of metrics, ledger and pass.
inline std::string to_csv(const CommandResult& r) {
  if (!r.csv.empty()) {
    return r.csv;
  }
  std::ostringstream os;
  os << "key,value\n";
  detail::flatten(r.document.at("metrics"), "metrics", os);
  detail::flatten(r.document.at("ledger"), "ledger", os);
  os << "pass," << (r.document.at("pass").get<bool>() ? "true" : "false") << '\n';
  return os.str();
}

inline nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace hamxform::cli
