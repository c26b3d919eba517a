#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wnls/config.hpp"
#include "wnls/errors.hpp"
#include "wnls/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Wick-renormalized cubic NLS verification lab"};
  app.footer("Config keys and defaults:\n" + wnls::describe_defaults());
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "INI experiment configuration")->required()->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "override run.seed");
  auto* out_opt = app.add_option("--out", out, "override run.output");
  auto* threads_opt = app.add_option("--threads", threads, "override run.threads");
  app.add_flag("--verbose", verbose, "progress messages");
  for (const auto& name : wnls::subcommands()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : wnls::exit_config_error;
  }

  wnls::ExperimentConfig cfg;
  try {
    cfg = wnls::parse_config(config_path);
    if (*seed_opt) cfg.seed = seed;
    if (*out_opt) cfg.output = out;
    if (*threads_opt) cfg.threads = threads;
    cfg.validate();
  } catch (const wnls::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return wnls::exit_config_error;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  return wnls::run_guarded(sub, cfg, std::cerr, verbose);
}
