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

// hamxform transform|verify|learn|block-encode [--config FILE] [--seed N]
//          [--out FILE] [--format json|csv] [--threads K]

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hamxform/cli.hpp"

namespace {

using hamxform::cli::CommandOptions;
using hamxform::cli::CommandResult;
using hamxform::cli::ConfigError;

int emit(const CommandResult& r, const std::string& format, const std::string& out_path) {
  const std::string text = format == "csv" ? hamxform::cli::to_csv(r) : r.document.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return hamxform::cli::kExitUsage;
    }
    out << text;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward-only Hamiltonian transformation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format = "json";
  unsigned threads = 1;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config_path, "JSON config file");
    if (config_required) {
      c->required();
    }
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--out", out_path, "write the result here instead of stdout");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", threads, "worker threads for Monte Carlo runs")->check(CLI::Range(1u, 256u));
  };

  auto* transform = app.add_subcommand("transform", "run the transformation for a configured oracle and map");
  add_common(transform, true);

  std::string suite;
  std::optional<std::size_t> verify_n;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "lemma4 | error | variance | theorem2 | qdrift-bound | twirl")->required();
  verify->add_option("--n", verify_n, "qubit count (lemma4)");
  add_common(verify, false);

  auto* learn = app.add_subcommand("learn", "estimate one Pauli coefficient");
  add_common(learn, true);

  auto* block = app.add_subcommand("block-encode", "simulate e^{+-iH't} from a block Hamiltonian oracle");
  add_common(block, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hamxform::cli::kExitUsage;
  }

  CommandOptions opt{seed, threads};
  try {
    nlohmann::json config;
    if (!config_path.empty()) {
      config = hamxform::cli::load_config(config_path);
    }
    CommandResult r;
    if (transform->parsed()) {
      r = hamxform::cli::cmd_transform(config, opt);
    } else if (verify->parsed()) {
      if (verify_n) {
        if (config.is_null()) {
          config = {{"version", hamxform::cli::kConfigVersion}};
        }
        config["n"] = *verify_n;
      }
      r = hamxform::cli::cmd_verify(suite, config, opt);
    } else if (learn->parsed()) {
      r = hamxform::cli::cmd_learn(config, opt);
    } else {
      r = hamxform::cli::cmd_block_encode(config, opt);
    }
    return emit(r, format, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
  } catch (const std::length_error& e) {
    std::cerr << "limit exceeded: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return hamxform::cli::kExitUsage;
}
