#include "doctest.h"
#include "wnls/config.hpp"
#include "wnls/errors.hpp"

using namespace wnls;

TEST_CASE("empty configuration yields the documented defaults") {
  const auto cfg = parse_config_text("");
  CHECK(serialize_config(cfg) == serialize_config(ExperimentConfig{}));
  CHECK(config_hash(cfg).size() == 16);
  CHECK(describe_defaults().find("flow.dt = 0.001") != std::string::npos);
}

TEST_CASE("canonical rendering round-trips and keys the hash") {
  const auto cfg = parse_config_text(
      "[lattice]\ndimension = 1\nn_cut = 16\n[flow]\ndt = 0.0025\nT = -0.5\nintegrator = strang\n"
      "[level_set]\nr = 1.5\n[run]\nseed = 7\n");
  CHECK(cfg.dimension == 1);
  CHECK(cfg.T == -0.5);
  CHECK(cfg.level == "1.5");
  const auto again = parse_config_text(serialize_config(cfg));
  CHECK(serialize_config(again) == serialize_config(cfg));
  CHECK(config_hash(again) == config_hash(cfg));

  auto other = cfg;
  other.seed = 8;
  CHECK(config_hash(other) != config_hash(cfg));
  other = cfg;
  other.output = "elsewhere";
  other.threads = 4;
  CHECK(config_hash(other) == config_hash(cfg));
}

TEST_CASE("strict validation") {
  CHECK_THROWS_AS(parse_config_text("[norm]\nbeta = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[norm]\nbeta = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[flow]\ntimestep = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[bogus]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[flow]\ndt = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[flow]\ndt = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[lattice]\ndimension = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[wick]\nenabled = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[flow\ndt = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[level_set]\ndelta = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("list parsers and dimension-aware defaults") {
  CHECK(parse_int_list("4, 8,16") == std::vector<int>{4, 8, 16});
  CHECK(parse_double_list("0.4,0.2") == std::vector<double>{0.4, 0.2});
  const auto modes = parse_mode_list("1,0;1,1", 2);
  REQUIRE(modes.size() == 2);
  CHECK(modes[1] == Mode{1, 1});
  const auto pairs = parse_mode_pairs("1,0:0,1", 2);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].second == Mode{0, 1});
  CHECK_THROWS_AS(parse_mode_list("1,0,2", 2), ConfigError);

  ExperimentConfig cfg;
  CHECK(second_moment_modes(cfg) == std::vector<Mode>{{1, 0}, {1, 1}, {2, 0}});
  cfg.dimension = 1;
  CHECK(second_moment_modes(cfg).size() == 3);
  CHECK(grad_pairs(cfg).size() == 3);
}

TEST_CASE("derived component configurations") {
  ExperimentConfig cfg;
  CHECK(dispersion_value(cfg) == 0.5);
  cfg.dispersion = "angular";
  CHECK(dispersion_value(cfg) == doctest::Approx(39.47841760435743));
  cfg.dispersion = "2.5";
  CHECK(dispersion_value(cfg) == 2.5);
  cfg.dispersion = "fast";
  CHECK_THROWS_AS(dispersion_value(cfg), ConfigError);

  cfg = ExperimentConfig{};
  const auto lat = build_lattice(2, cfg.n_cut);
  CHECK(wick_spec(cfg, *lat).C() == doctest::Approx(WickSpec::lattice_default(*lat).C()));
  cfg.wick = false;
  CHECK(wick_spec(cfg, *lat).is_plain());
  const auto flow = flow_config(cfg, *lat);
  CHECK(flow.dt == cfg.dt);
  const auto inv = invariance_config(cfg);
  CHECK(inv.dt == cfg.invariance_dt);
  CHECK(inv.members == cfg.members);
  cfg.level = "2.5";
  CHECK(surface_config(cfg).r.value() == 2.5);
  cfg.level = "auto";
  CHECK_FALSE(surface_config(cfg).r.has_value());
}
