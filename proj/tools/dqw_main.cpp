// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

// dqw: config-driven runner for driven quantum walk experiments.
//
//   dqw run --config configs/lasing-chain.json --out out/lasing-chain
//
// Exit codes: 0 ok, 2 config validation, 3 numerical instability, 4 I/O.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dqw/experiment.hpp"

namespace {

int report_error(int code, const std::string& status, const std::string& message) {
  nlohmann::json err = {{"status", status}, {"exit_code", code}, {"error", message}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven continuous-time quantum walks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dqw::kVersion));

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  double dt = 0.0;
  bool quiet = false;
  app.add_option("--config", config_path, "Experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--threads", threads, "Worker threads for sweeps and scaling studies")->check(CLI::PositiveNumber);
  app.add_option("--dt", dt, "Integration step (overrides the config)");
  app.add_flag("--quiet", quiet, "Only report errors");

  const char* subcommands[][2] = {{"run", "Driven walk trajectory"},
                                  {"spectrum", "Eigenfrequencies of a graph"},
                                  {"sweep", "Final photon numbers versus pump frequency"},
                                  {"decompose", "Factorized versus direct evolution"},
                                  {"search", "Driven search on glued trees"},
                                  {"scaling", "Target-mode weight versus depth"},
                                  {"baseline", "Classical random-walk hitting times"}};
  for (const auto& [name, help] : subcommands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dqw::kExitValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  nlohmann::json doc;
  {
    std::ifstream f(config_path);
    if (!f) return report_error(dqw::kExitValidation, "validation_error", "config file '" + config_path + "' cannot be read");
    try {
      doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      return report_error(dqw::kExitValidation, "validation_error",
                          "config file '" + config_path + "': malformed JSON at byte " + std::to_string(e.byte));
    }
  }
  if (doc.is_object() && !doc.contains("experiment")) doc["experiment"] = command;
  if (doc.is_object() && doc["experiment"] != command)
    return report_error(dqw::kExitValidation, "validation_error",
                        "subcommand '" + command + "' does not match the config's experiment " + doc["experiment"].dump());

  dqw::ExperimentConfig config;
  try {
    config = dqw::parse_experiment_config(doc, std::filesystem::path(config_path).parent_path());
  } catch (const std::invalid_argument& e) {
    return report_error(dqw::kExitValidation, "validation_error", e.what());
  }

  dqw::RunOptions options;
  if (!out_dir.empty()) options.out_dir = out_dir;
  if (app.count("--dt") > 0) options.dt = dt;
  options.threads = threads;
  options.quiet = quiet;
  options.log = &std::cout;

  const auto outcome = dqw::run_experiment(config, options);
  if (outcome.exit_code != dqw::kExitOk) return report_error(outcome.exit_code, outcome.status, outcome.error);
  if (!quiet) std::cout << "status: ok (" << outcome.files.size() << " files)\n";
  return dqw::kExitOk;
}
