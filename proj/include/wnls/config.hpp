#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wnls/flow.hpp"
#include "wnls/invariance.hpp"

namespace wnls {

/// Every experiment parameter. Defaults are the values listed by `describe_defaults()`.
struct ExperimentConfig {
  // [lattice]
  int dimension = 2;
  int n_cut = 8;
  double a = 2.0;
  // [norm]
  double beta = -0.5;
  // [wick]
  bool wick = true;
  std::string wick_cutoff = "lattice";  // lattice | norm_le | norm_lt
  int wick_cutoff_value = 0;            // 0 = n_cut
  // [flow]
  double dt = 1e-3;
  double T = 1.0;
  std::string integrator = "lawson_rk4";
  std::string dispersion = "gibbs";  // gibbs | unit | angular | <number>
  double drift_tolerance = 1e-9;
  bool project_each_step = false;
  int checkpoints = 10;
  // [ensemble]
  std::size_t members = 1000;
  std::string base = "gibbs";      // gibbs | mu2
  std::string source = "hmc";      // hmc | importance
  std::size_t pool_factor = 20;
  int hmc_burn_in = 200;
  int hmc_iterations = 20;
  int hmc_leapfrog = 10;
  double hmc_step = 0.05;
  // [moments]
  std::size_t moment_samples = 100000;
  int moment_max_norm_sq = 5;
  int moment_max_p = 3;
  // [second_moment]
  std::size_t second_moment_samples = 100000;
  std::string second_moment_modes = "auto";  // auto: (1,0);(1,1);(2,0) in d = 2, 1;2;3 in d = 1
  std::string grad_pairs = "auto";  // auto: (1,0):(1,0);(1,0):(0,1);(1,1):(2,0) in d = 2, 1:1;1:2;2:-1 in d = 1
  // [wick_bound]
  std::string cutoffs = "4,8,16,32";
  std::size_t bound_samples = 4000;
  // [invariance]
  double alpha = 0.01;
  std::size_t panel_modes = 6;
  std::string design = "split";
  bool negative_control = true;
  double invariance_dt = 5e-3;
  // [level_set]
  std::string level = "auto";  // auto | <number>
  double delta = 0.2;
  double bandwidth = 0.0;
  std::string refinement = "0.4,0.2,0.1";
  // [series]
  std::string series_K = "8,16,32,64";
  double series_beta = -0.5;
  // [run]
  std::uint64_t seed = 20240101;
  std::string output = "out";
  unsigned threads = 1;

  void validate() const;
};

/// Strict INI parsing: unknown sections or keys, syntax errors and constraint violations throw ConfigError.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Canonical INI rendering (fixed key order, shortest round-trip numbers).
std::string serialize_config(const ExperimentConfig& cfg);
/// FNV-1a 64 of the canonical rendering, as 16 hex digits. The output directory and thread
/// count do not change results and are left out.
std::string config_hash(const ExperimentConfig& cfg);
std::string describe_defaults();

std::vector<int> parse_int_list(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);
std::vector<Mode> parse_mode_list(const std::string& s, int dim);
std::vector<std::pair<Mode, Mode>> parse_mode_pairs(const std::string& s, int dim);
std::vector<Mode> second_moment_modes(const ExperimentConfig& cfg);
std::vector<std::pair<Mode, Mode>> grad_pairs(const ExperimentConfig& cfg);

double dispersion_value(const ExperimentConfig& cfg);
WickSpec wick_spec(const ExperimentConfig& cfg, const FreqLattice& lattice);
FlowConfig flow_config(const ExperimentConfig& cfg, const FreqLattice& lattice);
InvarianceConfig invariance_config(const ExperimentConfig& cfg);
SurfaceConfig surface_config(const ExperimentConfig& cfg);

}  // namespace wnls
