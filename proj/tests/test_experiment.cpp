#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "drone/common.hpp"
#include "drone/experiment.hpp"

using namespace drone;

namespace {

bool rows_equal(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a[r].size() != b[r].size()) return false;
    for (std::size_t c = 0; c < a[r].size(); ++c) {
      const double x = a[r][c], y = b[r][c];
      if (std::isnan(x) != std::isnan(y)) return false;
      if (!std::isnan(x) && x != y) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("ini parser handles sections, comments, whitespace, and overrides") {
  const std::string text =
      "# leading comment\n"
      "[run]\n"
      "name = alpha   ; trailing comment\n"
      "horizon=25\n"
      "\n"
      "[game]\n"
      "  agents  =  2 \n"
      "[run]\n"
      "name = beta\n";
  const ConfigMap map = parse_ini_text(text, "inline");
  CHECK(map.at("run.name") == "beta");  // last write wins
  CHECK(map.at("run.horizon") == "25");
  CHECK(map.at("game.agents") == "2");
  CHECK(map.size() == 3);
  CHECK_THROWS_AS(parse_ini_text("[run\nname=x\n", "inline"), ConfigError);
  CHECK_THROWS_AS(parse_ini_text("name=x\n", "inline"), ConfigError);
  CHECK_THROWS_AS(parse_ini_text("[run]\njust a line\n", "inline"), ConfigError);
  CHECK_THROWS_AS(parse_ini_file("no_such_config_file.cfg"), ConfigError);
}

TEST_CASE("config builder rejects unknown keys and bad enums") {
  ConfigMap map = parse_ini_text(builtin_config_text("case1_alpha_0p1"), "builtin");
  map["run.typo_key"] = "1";
  CHECK_THROWS_WITH_AS(build_config(map), doctest::Contains("unknown key"), ConfigError);
  map.erase("run.typo_key");
  map["run.architecture"] = "peer-to-peer";
  CHECK_THROWS_AS(build_config(map), ConfigError);
}

TEST_CASE("every built-in configuration assembles into a valid instance") {
  const auto names = builtin_config_names();
  CHECK(names.size() == 8);
  for (const std::string& name : names) {
    CAPTURE(name);
    const ExperimentConfig cfg = builtin_config(name);
    const Instance inst = build_instance(cfg);
    CHECK(inst.game.agents() == static_cast<std::size_t>(cfg.agents));
    CHECK(validate_params(inst.params, inst.game.boxes).ok);
    // Initial profile inside the boxes.
    for (int i = 0; i < cfg.agents; ++i)
      CHECK(inst.game.boxes[static_cast<std::size_t>(i)].contains(
          {cfg.init[static_cast<std::size_t>(i)]}, 1e-12));
  }
  CHECK_THROWS_AS(builtin_config("no_such_benchmark"), ConfigError);
}

TEST_CASE("shipped config files match the built-in texts") {
  const char* root = std::getenv("DRONE_ROOT");
  REQUIRE(root != nullptr);
  for (const std::string& name : builtin_config_names()) {
    CAPTURE(name);
    const ConfigMap from_file =
        parse_ini_file(std::string(root) + "/configs/" + name + ".cfg");
    const ConfigMap from_builtin = parse_ini_text(builtin_config_text(name), name);
    CHECK(from_file == from_builtin);
  }
}

TEST_CASE("repeated runs of the same config are bitwise identical in memory") {
  ExperimentConfig cfg = builtin_config("dro_individual_demo");
  cfg.horizon = 30;
  cfg.eta_cadence = 10;
  const RunResult a = run_experiment(cfg);
  const RunResult b = run_experiment(cfg);
  CHECK(rows_equal(a.trajectory.rows, b.trajectory.rows));
  CHECK(a.trajectory.columns == b.trajectory.columns);
  CHECK(a.summary == b.summary);
  CHECK(a.final_profile.blocks == b.final_profile.blocks);
}

TEST_CASE("runs keep iterates inside the boxes and the value nonnegative") {
  ExperimentConfig cfg = builtin_config("case1_alpha_0p1");
  cfg.horizon = 60;
  const RunResult res = run_experiment(cfg);
  const Instance& inst = res.instance;
  REQUIRE(res.value.size() == static_cast<std::size_t>(cfg.horizon) + 1);
  for (double v : res.value) {
    if (!std::isnan(v)) CHECK(v >= -1e-12);
  }
  for (std::size_t i = 0; i < inst.game.agents(); ++i)
    CHECK(inst.game.boxes[i].contains(res.final_profile.blocks[i], 1e-12));
  // The summary carries the headline diagnostics.
  bool saw_value = false;
  for (const auto& [key, val] : res.summary) {
    if (key == "value_final") {
      saw_value = true;
      CHECK_FALSE(val.empty());
    }
    CHECK(key != "wall_seconds");  // timing is kept out of comparable outputs
  }
  CHECK(saw_value);
}

TEST_CASE("distributed runs populate tracking diagnostics") {
  ExperimentConfig cfg = builtin_config("case2_tcon10");
  cfg.horizon = 25;
  const RunResult res = run_experiment(cfg);
  bool any_tracking = false;
  for (double v : res.tracking)
    if (!std::isnan(v)) any_tracking = true;
  CHECK(any_tracking);
}

TEST_CASE("sample csv serialization round-trips exactly") {
  const std::vector<Vec> rows{{0.125, -1.0}, {2.0, 1.0 / 3.0}};
  const std::string path = "experiment_suite_samples_tmp.csv";
  write_sample_csv(path, rows);
  const std::vector<Vec> back = load_sample_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) CHECK(back[k] == rows[k]);
  std::remove(path.c_str());
}

TEST_CASE("sweep axis parser") {
  const SweepAxis axis = parse_sweep_axis("algorithm.alpha=0.01, 0.1");
  CHECK(axis.key == "algorithm.alpha");
  CHECK(axis.values == std::vector<std::string>{"0.01", "0.1"});
  CHECK_THROWS_AS(parse_sweep_axis("algorithm.alpha"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_axis("alpha=0.1"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_axis("algorithm.alpha="), ConfigError);
}

TEST_CASE("steady-state and ball-entry helpers") {
  RunResult r;
  r.dist_ne = {1.0, 0.5, 0.05, 0.2, 0.05, 0.04, 0.03};
  CHECK(r.steps_to_ball(0.1) == 4);  // the dip at t=2 exits again at t=3
  CHECK(r.steps_to_ball(0.001) == -1);
  r.dist_ne = {0.05, 0.04};
  CHECK(r.steps_to_ball(0.1) == 0);
  Vec series(20, 1.0);
  series[18] = 3.0;
  series[19] = 5.0;
  CHECK(r.steady_state_mean(series) == doctest::Approx(4.0));  // last 10% = 2 entries
  CHECK(std::isnan(r.steady_state_mean({})));
}

TEST_SUITE_END();
