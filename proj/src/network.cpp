#include "drone/network.hpp"

#include <algorithm>
#include <cmath>

namespace drone {

namespace {

Vec field_inputs(const Profile& s, const std::vector<int>& owner,
                 const std::vector<std::size_t>& offset, std::size_t coord, int nodes) {
  Vec u(static_cast<std::size_t>(nodes), 0.0);
  const int o = owner[coord];
  u[static_cast<std::size_t>(o)] = scaled_input_for_owner(
      nodes, s.blocks[static_cast<std::size_t>(o)][offset[coord]]);
  return u;
}

void require_degree_balanced(const Digraph& g) {
  for (int i = 0; i < g.nodes; ++i)
    require_config(g.in_arcs[static_cast<std::size_t>(i)].size() ==
                       g.out_arcs[static_cast<std::size_t>(i)].size(),
                   "scenario program: graph must have equal in- and out-degree per node "
                   "(budget transfers cancel in aggregate only then)");
}

double slice_cost(const Vec& copy, const Vec& row, std::size_t begin, std::size_t end) {
  double acc = 0.0;
  for (std::size_t l = begin; l < end; ++l) acc += std::fabs(row[l] - copy[l]);
  return acc;
}

}  // namespace

NetworkState init_network(const Profile& start, const std::vector<Box>& boxes,
                          const ConsensusSystem& system, Rng& rng) {
  const int nodes = system.graph.nodes;
  require_config(static_cast<std::size_t>(nodes) == boxes.size(),
                 "network: one graph node per agent required");
  NetworkState state;
  state.dyn = init_dynamics(start);
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t l = 0; l < boxes[i].dim(); ++l) {
      state.owner.push_back(static_cast<int>(i));
      state.offset.push_back(l);
    }
  state.fields.reserve(state.owner.size());
  for (std::size_t c = 0; c < state.owner.size(); ++c) {
    const int o = state.owner[c];
    const Box& box = boxes[static_cast<std::size_t>(o)];
    const Vec u = field_inputs(start, state.owner, state.offset, c, nodes);
    Vec z0(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
      // Initial estimate: the owner knows its value; everyone else guesses
      // uniformly inside the owner's box.
      const double guess = (i == o) ? start.blocks[static_cast<std::size_t>(o)][state.offset[c]]
                                    : uniform(rng, box.lower[state.offset[c]],
                                              box.upper[state.offset[c]]);
      z0[static_cast<std::size_t>(i)] = guess - u[static_cast<std::size_t>(i)];
    }
    state.fields.push_back(ConsensusField::start(z0));
  }
  return state;
}

Profile estimated_profile(const NetworkState& state, int agent, const std::vector<Box>& boxes,
                          const ConsensusSystem& system) {
  Profile est = state.dyn.current;
  const int nodes = system.graph.nodes;
  for (std::size_t c = 0; c < state.fields.size(); ++c) {
    const int o = state.owner[c];
    if (o == agent) continue;  // own block is known exactly
    const Vec u = field_inputs(state.dyn.current, state.owner, state.offset, c, nodes);
    const Vec x = state.fields[c].output(u);
    est.blocks[static_cast<std::size_t>(o)][state.offset[c]] =
        x[static_cast<std::size_t>(agent)];
  }
  for (std::size_t j = 0; j < boxes.size(); ++j)
    est.blocks[j] = boxes[j].clamp(est.blocks[j]);
  return est;
}

NetworkState network_round(const NetworkState& state, const EstimateField& estimate_based,
                           const EstimateField& exact, const AlgoParams& params,
                           const std::vector<Box>& boxes, const ConsensusSystem& system,
                           int sub_steps, RoundLog* log) {
  require(sub_steps >= 1, "network_round: need at least one estimator sub-step");
  const std::size_t n = boxes.size();
  const int nodes = system.graph.nodes;
  NetworkState next = state;
  // Inputs are held at the round-start profile for the whole round.
  std::vector<Vec> inputs(state.fields.size());
  for (std::size_t c = 0; c < state.fields.size(); ++c)
    inputs[c] = field_inputs(state.dyn.current, state.owner, state.offset, c, nodes);
  for (int sub = 0; sub < sub_steps - 1; ++sub)
    for (std::size_t c = 0; c < next.fields.size(); ++c)
      consensus_substep(next.fields[c], inputs[c], system);

  if (log != nullptr) {
    log->tracking = 0.0;
    for (std::size_t c = 0; c < next.fields.size(); ++c)
      log->tracking = std::max(log->tracking, tracking_error(next.fields[c], inputs[c]));
    log->phi_exact.resize(n);
    log->phi_est.resize(n);
  }

  // Strategy update from estimate-based directions.
  DynamicsState dyn_next;
  dyn_next.previous = state.dyn.current;
  dyn_next.step = state.dyn.step + 1;
  dyn_next.current.blocks.resize(n);
  double direction_gap_sq = 0.0;
  double vertex_gap_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Profile est = estimated_profile(next, static_cast<int>(i), boxes, system);
    const Vec v_est = estimate_based(static_cast<int>(i), est);
    const Vec phi_est =
        compose_phi(params.mu[i], v_est, params.lambda[i], state.dyn.current.blocks[i],
                    state.dyn.previous.blocks[i]);
    const Vec vertex_est = support_argmax(phi_est, boxes[i]);
    const double a = params.alpha[i];
    Vec s_next(vertex_est.size());
    for (std::size_t l = 0; l < vertex_est.size(); ++l)
      s_next[l] = (1.0 - a) * state.dyn.current.blocks[i][l] + a * vertex_est[l];
    require(boxes[i].contains(s_next, 1e-12), "network_round: iterate left the strategy box");
    dyn_next.current.blocks[i] = std::move(s_next);
    if (log != nullptr) {
      const Vec v_exact = exact(static_cast<int>(i), state.dyn.current);
      const Vec phi_exact =
          compose_phi(params.mu[i], v_exact, params.lambda[i], state.dyn.current.blocks[i],
                      state.dyn.previous.blocks[i]);
      const Vec vertex_exact = support_argmax(phi_exact, boxes[i]);
      const Vec dv = sub(v_est, v_exact);
      const Vec dvert = sub(vertex_est, vertex_exact);
      direction_gap_sq += dot(dv, dv);
      vertex_gap_sq += dot(dvert, dvert);
      log->phi_exact[i] = phi_exact;
      log->phi_est[i] = phi_est;
    }
  }
  if (log != nullptr) {
    log->direction_gap = std::sqrt(direction_gap_sq);
    log->vertex_gap = std::sqrt(vertex_gap_sq);
  }

  // Final estimator sub-step (becomes the warm start of the next round).
  for (std::size_t c = 0; c < next.fields.size(); ++c)
    consensus_substep(next.fields[c], inputs[c], system);
  next.dyn = std::move(dyn_next);
  return next;
}

void ScenarioProgram::validate() const {
  require_config(game != nullptr, "scenario program: missing game");
  const std::size_t n = game->agents();
  samples.validate(n);
  require_config(!samples.slices.empty(),
                 "scenario program: coordinate ownership slices are required");
  require_config(samples.dim() == game->noise_dim && support.dim() == game->noise_dim,
                 "scenario program: sample/support dimension must match the game");
  require_config(eps.size() == n, "scenario program: one radius per agent required");
  for (double e : eps) require_config(e >= 0.0, "scenario program: negative radius");
  for (const Vec& r : samples.rows)
    require_config(support.contains(r, 1e-9), "scenario program: sample outside support box");
  require_config(samples.count() <= 64 && n <= 64, "scenario program: instance too large");
}

LocalProblem build_local_problem(const ScenarioProgram& program, const Digraph& graph,
                                 int agent) {
  program.validate();
  graph.validate();
  require_degree_balanced(graph);
  require_config(graph.nodes == static_cast<int>(program.game->agents()),
                 "scenario program: one graph node per agent");
  LocalProblem lp;
  lp.agent = agent;
  lp.slice_begin = program.samples.slices[static_cast<std::size_t>(agent)].first;
  lp.slice_end = program.samples.slices[static_cast<std::size_t>(agent)].second;
  lp.budget = static_cast<double>(program.samples.count()) *
              program.eps[static_cast<std::size_t>(agent)];
  lp.in_neighbors = graph.in_neighbors(agent);
  for (const auto& [to, w] : graph.out_arcs[static_cast<std::size_t>(agent)]) {
    (void)w;
    lp.out_neighbors.push_back(to);
  }
  return lp;
}

PdState pd_init(const ScenarioProgram& program) {
  program.validate();
  const std::size_t n = program.game->agents();
  const std::size_t N = program.samples.count();
  PdState st;
  st.copies.assign(n, std::vector<std::vector<Vec>>(n, program.samples.rows));
  st.transfer.assign(n, Vec(n, 0.0));
  st.row_multiplier.assign(n, Vec(n, 0.0));
  st.eq_multiplier.assign(
      n, std::vector<std::vector<Vec>>(n, std::vector<Vec>(N, Vec(program.samples.dim(), 0.0))));
  return st;
}

void pd_iterate(PdState& state, const ScenarioProgram& program, const Profile& s,
                const Digraph& graph, const PdOptions& opts) {
  program.validate();
  require_degree_balanced(graph);
  const std::size_t n = program.game->agents();
  const std::size_t N = program.samples.count();
  const std::size_t m = program.samples.dim();
  const double inv_n_samples = 1.0 / static_cast<double>(N);
  const auto& rows = program.samples.rows;
  const auto& slices = program.samples.slices;

  // The primal forward step is scaled to the stiffness of the smooth
  // (quadratic-penalty) block so it stays stable however large the penalty
  // weight or node degree is; the nonsmooth transport cost is handled by an
  // exact shrinkage step, which cannot overshoot. Multipliers take classical
  // method-of-multipliers updates (step ~ rho) every `dual_every` passes.
  double deg_max = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    deg_max = std::max(deg_max, static_cast<double>(graph.in_arcs[i].size()));
  const double gp =
      opts.primal_step / (1.0 + opts.rho * (1.0 + deg_max + deg_max * deg_max));
  const double gd = opts.dual_step * opts.rho;

  for (int t = 1; t <= opts.iters; ++t) {
    state.step_count += 1;
    const bool dual_update =
        opts.dual_every <= 1 || state.step_count % opts.dual_every == 0;

    // Row values g(i,j), their working prices, and equality residuals.
    std::vector<Vec> g(n, Vec(n, 0.0));
    std::vector<Vec> coef(n, Vec(n, 0.0));
    std::vector<std::vector<std::vector<Vec>>> h(
        n, std::vector<std::vector<Vec>>(n, std::vector<Vec>(N)));
    for (std::size_t i = 0; i < n; ++i) {
      const auto [bi, ei] = slices[i];
      const auto neighbors = graph.in_neighbors(static_cast<int>(i));
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < N; ++k)
          acc += slice_cost(state.copies[i][j][k], rows[k], bi, ei);
        for (int r : neighbors)
          acc += state.transfer[i][j] - state.transfer[static_cast<std::size_t>(r)][j];
        if (j == i)
          acc -= static_cast<double>(N) * program.eps[i];
        g[i][j] = acc;
        coef[i][j] = std::max(0.0, state.row_multiplier[i][j] + opts.rho * acc);
        for (std::size_t k = 0; k < N; ++k) {
          Vec res(m, 0.0);
          for (int r : neighbors)
            for (std::size_t l = 0; l < m; ++l)
              res[l] += state.copies[static_cast<std::size_t>(r)][j][k][l] -
                        state.copies[i][j][k][l];
          h[i][j][k] = std::move(res);
        }
      }
    }

    // Forward step on the smooth part, shrinkage on the priced transport
    // cost, projection onto the support box (simultaneous from pre-iteration
    // values).
    PdState next = state;
    for (std::size_t i = 0; i < n; ++i) {
      const auto [bi, ei] = slices[i];
      const double deg = static_cast<double>(graph.in_arcs[i].size());
      for (std::size_t j = 0; j < n; ++j) {
        const double shrink = gp * coef[i][j];
        for (std::size_t k = 0; k < N; ++k) {
          Vec grad(m, 0.0);
          if (j == i) {
            const Vec og = noise_gradient(*program.game, static_cast<int>(i), s,
                                          state.copies[i][i][k]);
            for (std::size_t l = 0; l < m; ++l) grad[l] += inv_n_samples * og[l];
          }
          for (std::size_t l = 0; l < m; ++l)
            grad[l] -= deg * (state.eq_multiplier[i][j][k][l] + opts.rho * h[i][j][k][l]);
          for (const auto& [ip, w] : graph.out_arcs[i]) {
            (void)w;
            const std::size_t io = static_cast<std::size_t>(ip);
            for (std::size_t l = 0; l < m; ++l)
              grad[l] += state.eq_multiplier[io][j][k][l] + opts.rho * h[io][j][k][l];
          }
          Vec& y = next.copies[i][j][k];
          for (std::size_t l = 0; l < m; ++l)
            y[l] = state.copies[i][j][k][l] - gp * grad[l];
          for (std::size_t l = bi; l < ei; ++l) {
            const double d = y[l] - rows[k][l];
            y[l] = rows[k][l] + (d > 0.0 ? std::max(d - shrink, 0.0)
                                         : std::min(d + shrink, 0.0));
          }
          for (std::size_t l = 0; l < m; ++l)
            y[l] = std::min(std::max(y[l], program.support.lower[l]), program.support.upper[l]);
        }
        double zgrad = coef[i][j] * deg;
        for (const auto& [ip, w] : graph.out_arcs[i]) {
          (void)w;
          zgrad -= coef[static_cast<std::size_t>(ip)][j];
        }
        next.transfer[i][j] = state.transfer[i][j] - gp * zgrad;
      }
    }
    // Method-of-multipliers dual update on a slower clock than the primal.
    if (dual_update)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          next.row_multiplier[i][j] = std::max(0.0, state.row_multiplier[i][j] + gd * g[i][j]);
          for (std::size_t k = 0; k < N; ++k)
            for (std::size_t l = 0; l < m; ++l)
              next.eq_multiplier[i][j][k][l] =
                  state.eq_multiplier[i][j][k][l] + gd * h[i][j][k][l];
        }
    state = std::move(next);
    for (std::size_t i = 0; i < n; ++i)
      require(std::fabs(state.transfer[i][i]) <= 1e9 && norm_inf(state.row_multiplier[i]) <= 1e9,
              "distributed solver: iterates diverged");
  }
}

PdDiagnostics pd_diagnostics(const PdState& state, const ScenarioProgram& program,
                             const Profile& s) {
  const std::size_t n = program.game->agents();
  const std::size_t N = program.samples.count();
  const std::size_t m = program.samples.dim();
  PdDiagnostics diag;
  diag.objective_per_agent.resize(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < N; ++k)
      acc += utility_eval(*program.game, static_cast<int>(i), s, state.copies[i][i][k]);
    diag.objective_per_agent[i] = acc / static_cast<double>(N);
    diag.objective += diag.objective_per_agent[i];
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < N; ++k)
      for (std::size_t l = 0; l < m; ++l) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += state.copies[i][j][k][l];
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
          diag.consensus_residual =
              std::max(diag.consensus_residual, std::fabs(state.copies[i][j][k][l] - mean));
      }
  for (std::size_t j = 0; j < n; ++j) {
    double used = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto [bi, ei] = program.samples.slices[i];
      for (std::size_t k = 0; k < N; ++k)
        used += slice_cost(state.copies[i][j][k], program.samples.rows[k], bi, ei);
    }
    const double cap = static_cast<double>(N) * program.eps[j];
    diag.budget_residual = std::max(diag.budget_residual, used - cap);
  }
  diag.budget_residual = std::max(diag.budget_residual, 0.0);
  return diag;
}

Vec pd_mean_scenario(const PdState& state, int agent) {
  const auto& own = state.copies[static_cast<std::size_t>(agent)][static_cast<std::size_t>(agent)];
  require(!own.empty(), "pd_mean_scenario: empty state");
  Vec mean(own[0].size(), 0.0);
  for (const Vec& y : own)
    for (std::size_t l = 0; l < mean.size(); ++l) mean[l] += y[l];
  for (double& v : mean) v /= static_cast<double>(own.size());
  return mean;
}

ScenarioSolution pd_solution_for_agent(const PdState& state, const ScenarioProgram& program,
                                       const Profile& s, int agent) {
  ScenarioSolution sol;
  sol.scenarios = state.copies[static_cast<std::size_t>(agent)][static_cast<std::size_t>(agent)];
  double acc = 0.0;
  for (std::size_t k = 0; k < sol.scenarios.size(); ++k) {
    acc += utility_eval(*program.game, agent, s, sol.scenarios[k]);
    sol.budget += norm1(sub(program.samples.rows[k], sol.scenarios[k]));
  }
  sol.value = acc / static_cast<double>(sol.scenarios.size());
  sol.converged = true;
  return sol;
}

std::vector<ScenarioSolution> centralized_reference_solve(const ScenarioProgram& program,
                                                          const Profile& s, double tol,
                                                          int max_iters) {
  program.validate();
  const std::size_t n = program.game->agents();
  require_config(n <= 8 && program.samples.count() <= 16 && program.samples.dim() <= 8,
                 "centralized reference: instance too large");
  DroOptions opts;
  opts.tol = tol;
  opts.max_iters = max_iters;
  std::vector<ScenarioSolution> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(dro_value(*program.game, static_cast<int>(i), s, program.samples,
                            program.eps[i], program.support, opts));
  return out;
}

}  // namespace drone
