#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "wnls/config.hpp"

namespace wnls {

enum ExitCode : int {
  exit_pass = 0,
  exit_acceptance_failure = 1,
  exit_config_error = 2,
  exit_runtime_error = 3,
};

const std::vector<std::string>& subcommands();

struct RunResult {
  std::map<std::string, bool> criteria;
  nlohmann::json details;
  bool pass() const;
};

/// Runs one experiment and writes its artifacts into cfg.output:
///   <subcommand>.csv / .jsonl   data, first line "# config_hash: <hash>"
///   summary.json                 hash, criteria, details
///   effective_config.ini         canonical configuration
///   metadata.json                wall-clock timestamps (kept out of the data files)
RunResult run_experiment(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log,
                         bool verbose = false);

/// Maps exceptions to exit codes and prints the message; returns the exit code.
int run_guarded(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log, bool verbose);

/// Reads the "# config_hash:" line of an artifact; empty string if absent.
std::string read_config_hash(const std::string& path);
/// Throws ConfigError unless every file carries the same config hash.
std::string require_matching_hashes(const std::vector<std::string>& paths);

}  // namespace wnls
