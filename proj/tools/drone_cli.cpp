// Command-line front end for the robust game simulator.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drone/experiment.hpp"

namespace {

void print_run(const drone::RunResult& res) {
  const auto& cfg = res.instance.config;
  std::printf("run %s [%s/%s] finished in %.2fs\n", cfg.name.c_str(), cfg.architecture.c_str(),
              cfg.mode.c_str(), res.wall_seconds);
  for (const auto& [k, v] : res.summary)
    if (k != "name" && k != "architecture" && k != "mode")
      std::printf("  %s = %s\n", k.c_str(), v.c_str());
  std::printf("  outputs: %s/trajectory.csv, %s/summary.csv\n", cfg.out_dir.c_str(),
              cfg.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust equilibrium seeking simulator for box-constrained games"};
  app.require_subcommand(1);

  std::string config_path, out_dir, which = "all", builtin_name;
  long seed = -1, horizon = -1;
  bool plots = false;
  std::vector<std::string> axis_texts;

  CLI::App* run = app.add_subcommand("run", "Run one experiment from a config file");
  run->add_option("--config", config_path, "Path to the .cfg file")->required();
  run->add_option("--out", out_dir, "Override the output directory");
  run->add_option("--seed", seed, "Override the run seed");
  run->add_option("--horizon", horizon, "Override the run horizon");
  run->add_flag("--plots", plots, "Also write SVG charts");

  CLI::App* rep = app.add_subcommand("replicate", "Run the bundled benchmark suites");
  rep->add_option("--which", which, "case1, case2, dro or all");
  rep->add_option("--out", out_dir, "Output root directory");
  rep->add_flag("--plots", plots, "Also write SVG charts");

  CLI::App* sweep = app.add_subcommand("sweep", "Grid sweep over config overrides");
  sweep->add_option("--config", config_path, "Path to the base .cfg file")->required();
  sweep->add_option("--axis", axis_texts, "Axis like algorithm.alpha=0.1,0.01 (repeatable)")
      ->required();
  sweep->add_option("--out", out_dir, "Output root directory");
  sweep->add_flag("--plots", plots, "Also write SVG charts");

  CLI::App* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("--config", config_path, "Path to the .cfg file")->required();

  CLI::App* builtin = app.add_subcommand("builtin", "Print a bundled config (or list names)");
  builtin->add_option("--name", builtin_name, "Builtin config name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      drone::ExperimentConfig cfg = drone::load_config(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
      if (horizon >= 1) cfg.horizon = horizon;
      drone::RunResult res = drone::run_experiment(cfg);
      drone::write_outputs(res, plots);
      print_run(res);
    } else if (rep->parsed()) {
      if (out_dir.empty()) out_dir = "out/replicate";
      for (const drone::RunResult& res : drone::replicate_benchmark(which, out_dir, plots))
        print_run(res);
      std::printf("comparison table: %s/comparison.csv\n", out_dir.c_str());
    } else if (sweep->parsed()) {
      if (out_dir.empty()) out_dir = "out/sweep";
      std::vector<drone::SweepAxis> axes;
      for (const std::string& text : axis_texts) axes.push_back(drone::parse_sweep_axis(text));
      const auto results = drone::run_sweep(drone::parse_ini_file(config_path), axes, out_dir, plots);
      std::printf("sweep finished: %zu points, table: %s/sweep.csv\n", results.size(),
                  out_dir.c_str());
    } else if (validate->parsed()) {
      drone::Instance inst = drone::build_instance(drone::load_config(config_path));
      std::printf("configuration valid: %s (%zu agents, %s/%s)\n", inst.config.name.c_str(),
                  inst.game.agents(), inst.config.architecture.c_str(),
                  inst.config.mode.c_str());
      std::printf("  decrement budget = %s, ceiling = %s\n",
                  drone::format_double(inst.bounds.total_cost * inst.bounds.rho1_value).c_str(),
                  drone::format_double(inst.bounds.ceiling).c_str());
    } else if (builtin->parsed()) {
      if (builtin_name.empty()) {
        for (const std::string& name : drone::builtin_config_names()) std::printf("%s\n", name.c_str());
      } else {
        std::fputs(drone::builtin_config_text(builtin_name).c_str(), stdout);
      }
    }
  } catch (const drone::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const drone::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
