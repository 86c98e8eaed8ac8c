// Networked variant of the dynamics: agents only see neighbors on a directed,
// weight-balanced, strongly connected graph. Between strategy updates they
// run dynamic-average-consensus sub-steps to track every coordinate of the
// joint profile (owners inject their value scaled by the node count, others
// inject zero), then step using supergradients evaluated at the estimated
// profile. The same module hosts the distributed solver for the shared-sample
// worst-case scenario program, written as per-node copies with slice-wise
// transport budgets, budget-transfer variables, and copy-equality rows.
#pragma once

#include <optional>

#include "drone/ambiguity.hpp"
#include "drone/common.hpp"
#include "drone/consensus.hpp"
#include "drone/dro.hpp"
#include "drone/dynamics.hpp"
#include "drone/game.hpp"

namespace drone {

// ----- estimate-based dynamics -----

// Supergradient provider evaluated at an agent-specific estimated profile.
using EstimateField = std::function<Vec(int agent, const Profile& estimated)>;

struct NetworkState {
  DynamicsState dyn;
  // One consensus estimator per joint coordinate; node i's output on field l
  // is its estimate of joint coordinate l.
  std::vector<ConsensusField> fields;
  // Flattened coordinate -> owning agent and offset inside the owner's block.
  std::vector<int> owner;
  std::vector<std::size_t> offset;
};

// Estimator states start from uniform draws inside the owner's box (agents
// have no prior knowledge of the others), shifted so the initial outputs
// equal those draws under the round-start inputs.
NetworkState init_network(const Profile& start, const std::vector<Box>& boxes,
                          const ConsensusSystem& system, Rng& rng);

// Per-round disturbance diagnostics (gaps between estimate-based and
// exact-information quantities, stacked Euclidean norms).
struct RoundLog {
  double direction_gap = 0.0;   // || scaled supergradient gap || over agents
  double vertex_gap = 0.0;      // || chosen-vertex gap || over agents
  double tracking = 0.0;        // max estimator error against the true profile
  std::vector<Vec> phi_exact;   // exact-information composite directions
  std::vector<Vec> phi_est;     // estimate-based composite directions
};

// Agent i's view of the profile: consensus outputs clamped into the owners'
// boxes, with the agent's own block replaced by its true strategy.
Profile estimated_profile(const NetworkState& state, int agent, const std::vector<Box>& boxes,
                          const ConsensusSystem& system);

// One outer round: sub_steps-1 estimator updates, strategy step from the
// estimated profiles, then one more estimator update (inputs are held at the
// round-start profile throughout). `exact` supplies the exact-information
// supergradients for the disturbance log; pass the same field twice to run
// without logging overhead.
NetworkState network_round(const NetworkState& state, const EstimateField& estimate_based,
                           const EstimateField& exact, const AlgoParams& params,
                           const std::vector<Box>& boxes, const ConsensusSystem& system,
                           int sub_steps, RoundLog* log = nullptr);

// ----- distributed worst-case scenario program (shared samples) -----

// Program data: every agent prices the same sample rows, owns a coordinate
// slice of the noise vector, and carries its own transport budget.
struct ScenarioProgram {
  const Game* game = nullptr;
  SampleSet samples;   // slices define coordinate ownership
  Box support;         // full-dimension support box
  Vec eps;             // per-agent ball radii

  void validate() const;
};

// Static description of one agent's block of the program (introspection and
// tests).
struct LocalProblem {
  int agent = 0;
  std::size_t slice_begin = 0;
  std::size_t slice_end = 0;
  double budget = 0.0;                 // N * eps_i (own row); peers carry 0
  std::vector<int> in_neighbors;
  std::vector<int> out_neighbors;
};
LocalProblem build_local_problem(const ScenarioProgram& program, const Digraph& graph, int agent);

struct PdOptions {
  int iters = 200;           // primal passes per call
  double rho = 10.0;         // augmented-Lagrangian weight
  double primal_step = 0.5;  // forward-step fraction of the stability limit
  double dual_step = 1.0;    // multiplier step as a fraction of rho
  int dual_every = 25;       // primal passes between multiplier updates
};

// Iterate state: copies[i][j][k] is node i's copy of program j's scenario k;
// transfer[i][j] shifts budget between neighboring nodes for program j.
struct PdState {
  std::vector<std::vector<std::vector<Vec>>> copies;
  std::vector<Vec> transfer;
  std::vector<Vec> row_multiplier;                          // >= 0, per (i, j)
  std::vector<std::vector<std::vector<Vec>>> eq_multiplier; // per (i, j, k)
  long step_count = 0;  // continues the diminishing-step schedule across calls
};

PdState pd_init(const ScenarioProgram& program);

// Runs opts.iters projected primal / dual ascent iterations on the augmented
// Lagrangian at the given strategy profile (the profile enters through the
// objective's noise gradients).
void pd_iterate(PdState& state, const ScenarioProgram& program, const Profile& s,
                const Digraph& graph, const PdOptions& opts);

struct PdDiagnostics {
  double objective = 0.0;          // sum over agents of own-copy sample averages
  Vec objective_per_agent;
  double consensus_residual = 0.0; // max copy deviation from the per-program mean
  double budget_residual = 0.0;    // max aggregated transport-budget violation
};
PdDiagnostics pd_diagnostics(const PdState& state, const ScenarioProgram& program,
                             const Profile& s);

// Mean of node `agent`'s own scenario copies (the worst-case distribution it
// acts on).
Vec pd_mean_scenario(const PdState& state, int agent);

// Per-agent solutions extracted from the node's own copies.
ScenarioSolution pd_solution_for_agent(const PdState& state, const ScenarioProgram& program,
                                       const Profile& s, int agent);

// Reference: solves each agent's program exactly on one machine (projected
// subgradient at tight tolerance). Guarded to small instances.
std::vector<ScenarioSolution> centralized_reference_solve(const ScenarioProgram& program,
                                                          const Profile& s, double tol = 1e-8,
                                                          int max_iters = 20000);

}  // namespace drone
