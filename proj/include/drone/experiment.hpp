// Experiment harness: INI-style config parsing, the end-to-end runner for
// centralized and networked runs in every sampling mode, built-in benchmark
// replication, parameter sweeps, and deterministic CSV/SVG emission.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drone/ambiguity.hpp"
#include "drone/common.hpp"
#include "drone/consensus.hpp"
#include "drone/dro.hpp"
#include "drone/dynamics.hpp"
#include "drone/game.hpp"
#include "drone/network.hpp"

namespace drone {

// Flat "section.key" -> raw value view of a config file (ordered, last write
// wins on duplicates).
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_ini_text(const std::string& text, const std::string& origin);
ConfigMap parse_ini_file(const std::string& path);

struct ExperimentConfig {
  // [run]
  std::string name = "experiment";
  std::string architecture = "centralized";   // centralized | distributed
  std::string mode = "stochastic-reference";  // stochastic-reference | dro-individual | dro-shared
  long horizon = 1000;
  std::uint64_t seed = 1;
  double burn_in = 0.8;        // fraction of the horizon treated as transient
  int eta_grid = 201;          // grid points per dimension for the residual oracle
  long eta_cadence = 0;        // residual every k steps; 0 = final step only
  std::string out_dir = "out";
  double margin = 0.5;         // decrement margin used in the value ceiling

  // [game] (scalar strategies per agent in the config path)
  std::string family = "quadratic";
  int agents = 0;
  Vec lower, upper;            // per agent
  Vec weights, targets, quad;  // family parameters (broadcast from scalars)
  Vec coupling;                // per agent coupling gain
  std::vector<Vec> noise_coeff;  // per agent, length = noise dimension
  Vec init;
  Vec ne;                      // declared equilibrium (optional)
  std::string ne_family = "none";  // none | points | product-corners

  // [algorithm]
  Vec alpha, mu, lambda, kappa;
  Vec amicability;             // empty = family defaults
  Vec locality;                // empty = joint-diameter default

  // [graph]
  std::string graph_kind = "none";  // none | cycle | complete | file
  int graph_size = 0;
  double graph_weight = 1.0;
  std::string graph_path;

  // [consensus]
  ConsensusGains gains;
  int t_con = 1;

  // [ambiguity]
  Vec epsilon;                 // explicit radii (overrides the schedule)
  std::optional<AmbiguitySpec> radius_schedule;
  double estimation_constant = 0.0;
  Vec support_lower, support_upper;
  std::string samples_file;
  int sample_count = 0;
  Vec sample_atoms;            // per-coordinate uniform atom draws
  std::vector<int> owner;      // owning agent (1-indexed) of each noise coordinate
  Vec xi_mean;                 // reference noise vector (stochastic-reference)

  // [dro]
  DroOptions dro;
  PdOptions pd;
  bool cold_start = false;
};

ExperimentConfig build_config(const ConfigMap& map);
ExperimentConfig load_config(const std::string& path);

// Assembled, validated problem instance.
struct Instance {
  ExperimentConfig config;
  Game game;
  AlgoParams params;
  BoundConstants bounds;
  std::optional<Box> noise_support;
  SampleSet samples;           // empty rows when the run needs none
  Vec epsilon;                 // resolved per-agent radii
  Vec xi_reference;            // fixed noise vector for reference runs
  std::optional<Digraph> graph;
};

// Builds the game/params/bounds and validates everything (ConfigError on any
// violation; the runner refuses invalid parameterizations).
Instance build_instance(const ExperimentConfig& config);

struct TrajectoryRecord {
  std::vector<std::string> columns;
  std::vector<Vec> rows;       // horizon+1 rows; NaN marks a value not computed
};

// Called once per recorded step with the row about to be appended.
using StepHook = std::function<void(long t, const std::vector<std::string>& columns,
                                    const Vec& row)>;

struct RunResult {
  Instance instance;
  TrajectoryRecord trajectory;
  std::vector<std::pair<std::string, std::string>> summary;
  Profile final_profile;
  // Convenience series (horizon+1 entries; NaN where not computed).
  Vec value;                   // Lyapunov value V(t) under exact information
  Vec dist_ne;                 // max-norm distance to the declared equilibrium set
  Vec eta_residual;            // grid best-response residual (cadenced)
  Vec tracking, direction_gap, vertex_gap, consensus_residual, budget_residual;
  double wall_seconds = 0.0;

  double steady_state_mean(const Vec& series) const;  // mean over the last 10%
  long steps_to_ball(double radius) const;  // first entry time with no later exit; -1 if never
};

RunResult run_experiment(const ExperimentConfig& config, const StepHook& hook = {});

// Writes trajectory.csv and summary.csv (and plots when requested) into
// config.out_dir.
void write_outputs(const RunResult& result, bool plots);

// ----- built-in configurations -----

std::vector<std::string> builtin_config_names();
std::string builtin_config_text(const std::string& name);
ExperimentConfig builtin_config(const std::string& name);

// Benchmark replication: runs every variant of "case1" or "case2", writes
// per-variant outputs plus comparison.csv under out_root.
std::vector<RunResult> replicate_benchmark(const std::string& which,
                                           const std::string& out_root, bool plots);

// ----- sweeps -----

struct SweepAxis {
  std::string key;                  // "section.key"
  std::vector<std::string> values;
};
// Parses "section.key=v1,v2,v3".
SweepAxis parse_sweep_axis(const std::string& text);

// Cartesian sweep over the axes; each point writes its outputs under
// out_root/point_<index>/ and one summary row in sweep.csv.
std::vector<RunResult> run_sweep(const ConfigMap& base, const std::vector<SweepAxis>& axes,
                                 const std::string& out_root, bool plots);

// ----- serialization helpers -----

// Sample file: one CSV row per sample (header "xi1,xi2,...").
std::vector<Vec> load_sample_csv(const std::string& path);
void write_sample_csv(const std::string& path, const std::vector<Vec>& rows);

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<Vec>& rows);

// Minimal line-chart SVG (one polyline per named series).
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<std::string>& names, const std::vector<Vec>& series);

}  // namespace drone
