// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dqw/graphs.hpp"
#include "dqw/pump.hpp"
#include "dqw/spectral.hpp"

namespace dqw {

inline constexpr const char* kVersion = "0.1.0";

/// Config file is unusable (schema, values, missing referenced files). Exit code 2.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3, kExitIo = 4 };

struct PumpSpec {
  DriveType drive = DriveType::Lasing;
  nlohmann::json profile = "center";
  std::optional<double> omega_p;
  std::optional<std::string> omega_p_rule;
  double gamma0 = 1.0;
};

struct TimeSpec {
  double t_final = 0.0;
  std::optional<double> dt;
  int record_every = 1;
  std::optional<std::pair<double, double>> fit_window;
};

/// Parsed and validated experiment description. `raw` keeps the original
/// document for the manifest echo.
struct ExperimentConfig {
  std::string experiment;
  nlohmann::json raw;
  std::optional<CouplingGraph> graph;
  std::optional<PumpSpec> pump;
  TimeSpec time;
  std::filesystem::path output_directory;
  nlohmann::json section;  // experiment-specific block (sweep, search, ...)
};

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir = std::filesystem::path("."));
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Resolves an omega_p rule against a spectrum:
///   "eigenmode:k"  k-th eigenfrequency counted from the top of the band (k = 1 is the highest),
///   "pair:j,k"     sum of two such eigenfrequencies (squeezing phase matching),
///   "mid-band"     the middle eigenfrequency (mean of the two middle ones for even n),
///   a number       used as is.
double resolve_omega_p(const std::string& rule, const EigenSystem& eig);

/// Builds the pump for `graph` from a spec, resolving the frequency rule.
PumpConfig build_pump(const PumpSpec& spec, const CouplingGraph& graph, const EigenSystem& eig);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  int threads = 1;
  std::optional<double> dt;
  bool quiet = false;
  std::ostream* log = nullptr;
};

struct ExperimentOutcome {
  int exit_code = kExitOk;
  std::string status = "ok";
  std::string error;
  std::vector<std::filesystem::path> files;
  nlohmann::json manifest;
};

/// Runs one experiment and writes its outputs plus manifest.json into the
/// output directory. Errors are caught, classified into exit codes and
/// recorded in the manifest, which is written whenever the directory is usable.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace dqw
