#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "wnls/errors.hpp"
#include "wnls/harness.hpp"

using namespace wnls;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("wnls_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string body(const fs::path& p) {
  const auto s = slurp(p);
  return s.substr(s.find('\n') + 1);
}

ExperimentConfig tiny_sample(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.dimension = 1;
  cfg.n_cut = 4;
  cfg.members = 40;
  cfg.hmc_burn_in = 20;
  cfg.output = out.string();
  return cfg;
}

int lab(const std::string& args) {
  const std::string cmd = std::string(WNLS_LAB_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("artifacts carry the config hash and a summary") {
  const auto dir = scratch("artifacts");
  const auto cfg = tiny_sample(dir);
  std::ostringstream log;
  const auto r = run_experiment("sample", cfg, log);
  CHECK(r.pass());
  CHECK(log.str().find("PASS ess_adequate") != std::string::npos);
  CHECK(read_config_hash((dir / "sample.jsonl").string()) == config_hash(cfg));
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["config_hash"] == config_hash(cfg));
  CHECK(summary["criteria"]["ess_adequate"] == true);
  CHECK(parse_config((dir / "effective_config.ini").string()).members == 40);
  CHECK(fs::exists(dir / "metadata.json"));
  CHECK(slurp(dir / "sample.jsonl").find("started") == std::string::npos);
}

TEST_CASE("same config and seed give byte-identical data files") {
  const auto a = scratch("repeat_a"), b = scratch("repeat_b");
  std::ostringstream log;
  auto cfg = tiny_sample(a);
  run_experiment("sample", cfg, log);
  cfg.output = b.string();
  cfg.threads = 3;
  run_experiment("sample", cfg, log);
  CHECK(slurp(a / "sample.jsonl") == slurp(b / "sample.jsonl"));

  auto series = ExperimentConfig{};
  series.series_K = "4,8";
  series.output = a.string();
  run_experiment("series", series, log);
  series.output = b.string();
  run_experiment("series", series, log);
  CHECK(body(a / "series.csv") == body(b / "series.csv"));
  CHECK(require_matching_hashes({(a / "series.csv").string(), (b / "series.csv").string()}) == config_hash(series));
}

TEST_CASE("artifacts from different configurations are refused together") {
  const auto a = scratch("mismatch_a"), b = scratch("mismatch_b");
  std::ostringstream log;
  auto cfg = tiny_sample(a);
  run_experiment("sample", cfg, log);
  cfg.output = b.string();
  cfg.seed += 1;
  run_experiment("sample", cfg, log);
  CHECK_THROWS_AS(require_matching_hashes({(a / "sample.jsonl").string(), (b / "sample.jsonl").string()}), ConfigError);
  CHECK_THROWS_AS(require_matching_hashes({(a / "summary.json").string()}), ConfigError);
  CHECK_THROWS_AS(run_experiment("nonsense", cfg, log), ConfigError);
}

TEST_CASE("command-line exit codes") {
  const auto ok = write_file("wnls_ok.ini", "[lattice]\ndimension = 1\nn_cut = 4\n[ensemble]\nmembers = 20\nhmc_burn_in = 10\n");
  const auto out = scratch("cli_ok");
  CHECK(lab("--config " + ok.string() + " --out " + out.string() + " sample") == 0);
  CHECK(fs::exists(out / "sample.jsonl"));

  const auto bad = write_file("wnls_bad.ini", "[norm]\nbeta = 0.1\n");
  const auto bad_out = scratch("cli_bad");
  CHECK(lab("--config " + bad.string() + " --out " + bad_out.string() + " sample") == 2);
  CHECK_FALSE(fs::exists(bad_out));
  const auto garbled = write_file("wnls_garbled.ini", "[flow\ndt = \n");
  CHECK(lab("--config " + garbled.string() + " --out " + bad_out.string() + " evolve") == 2);
  CHECK_FALSE(fs::exists(bad_out));
  CHECK(lab("--config /nonexistent.ini sample") == 2);
  CHECK(lab("--config " + ok.string() + " unknown-subcommand") == 2);
  CHECK(lab("sample") == 2);

  // the first series fails its acceptance thresholds
  const auto series = write_file("wnls_series.ini", "[series]\nK = 8,16,32,64\n");
  CHECK(lab("--config " + series.string() + " --out " + scratch("cli_series").string() + " series") == 1);

  const auto far = write_file("wnls_far.ini",
                              "[lattice]\ndimension = 1\nn_cut = 4\n[ensemble]\nmembers = 60\nhmc_burn_in = 10\n"
                              "[level_set]\nr = 500\ndelta = 0.01\n");
  CHECK(lab("--config " + far.string() + " --out " + scratch("cli_far").string() + " surface-invariance") == 3);
}
