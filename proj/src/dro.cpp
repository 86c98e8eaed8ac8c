#include "drone/dro.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drone {

namespace {

constexpr double kDivergenceGuard = 1e9;

Vec stack(const std::vector<Vec>& rows) {
  Vec out;
  for (const Vec& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<Vec> unstack(const Vec& x, std::size_t rows, std::size_t cols) {
  std::vector<Vec> out(rows, Vec(cols));
  for (std::size_t k = 0; k < rows; ++k)
    for (std::size_t l = 0; l < cols; ++l) out[k][l] = x[k * cols + l];
  return out;
}

Vec clamp_stacked(const Vec& x, const Box& support, std::size_t rows) {
  const std::size_t m = support.dim();
  Vec out(x.size());
  for (std::size_t k = 0; k < rows; ++k)
    for (std::size_t l = 0; l < m; ++l) {
      const double v = x[k * m + l];
      out[k * m + l] = std::min(std::max(v, support.lower[l]), support.upper[l]);
    }
  return out;
}

// Range of coordinates the scenarios of `solution` occupy inside a full
// sample row (whole row in shared mode, the agent's slice otherwise).
std::pair<std::size_t, std::size_t> scenario_span(const Game& game, int agent,
                                                  const SampleSet& samples,
                                                  const ScenarioSolution& solution) {
  (void)game;
  const std::size_t m = samples.dim();
  const std::size_t sdim = solution.scenarios.empty() ? m : solution.scenarios[0].size();
  if (sdim == m || samples.slices.empty()) return {0, m};
  const auto span = samples.slices[static_cast<std::size_t>(agent)];
  require(span.second - span.first == sdim, "scenario span: slice/scenario size mismatch");
  return span;
}

}  // namespace

Vec ScenarioSolution::mean_scenario() const {
  require(!scenarios.empty(), "mean_scenario: empty solution");
  Vec m(scenarios[0].size(), 0.0);
  for (const Vec& y : scenarios)
    for (std::size_t l = 0; l < m.size(); ++l) m[l] += y[l];
  for (double& v : m) v /= static_cast<double>(scenarios.size());
  return m;
}

Vec project_l1_ball(const Vec& d, double radius) {
  require(radius >= 0.0, "l1 projection: negative radius");
  if (norm1(d) <= radius) return d;
  if (radius == 0.0) return Vec(d.size(), 0.0);
  Vec mag(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) mag[i] = std::fabs(d[i]);
  Vec sorted = mag;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (k + 1 == sorted.size() || sorted[k + 1] <= candidate) {
      tau = candidate;
      break;
    }
  }
  Vec out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double shrunk = std::max(mag[i] - tau, 0.0);
    out[i] = (d[i] >= 0.0 ? shrunk : -shrunk);
  }
  return out;
}

std::vector<Vec> project_scenarios(const std::vector<Vec>& point, const std::vector<Vec>& rows,
                                   double budget, const Box& support, int sweeps) {
  require(point.size() == rows.size(), "scenario projection: row count mismatch");
  const std::size_t n = rows.size();
  const std::size_t m = support.dim();
  const Vec center = stack(rows);
  if (budget <= 0.0) return rows;
  Vec x = stack(point);
  Vec p(x.size(), 0.0), q(x.size(), 0.0);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    // Box half-step with its correction.
    Vec xp = add(x, p);
    Vec u = clamp_stacked(xp, support, n);
    p = sub(xp, u);
    // Transport-budget half-step with its correction.
    Vec uq = add(u, q);
    Vec shifted = sub(uq, center);
    Vec projected = project_l1_ball(shifted, budget);
    Vec v = add(center, projected);
    q = sub(uq, v);
    x = v;
  }
  // Exact feasibility repair: clamp into the box, then pull toward the center
  // (which lies in the box) until the transport budget holds exactly.
  x = clamp_stacked(x, support, n);
  Vec d = sub(x, center);
  const double used = norm1(d);
  if (used > budget) x = add(center, scale(d, budget / used));
  return unstack(x, n, m);
}

ScenarioSolution worst_case_scenarios(const ScenarioEval& eval, const ScenarioGrad& grad,
                                      const std::vector<Vec>& rows, double eps,
                                      const Box& support, const DroOptions& opts,
                                      const ScenarioSolution* warm) {
  require_config(!rows.empty(), "worst-case solver: no sample rows");
  const std::size_t n = rows.size();
  const std::size_t m = support.dim();
  for (const Vec& r : rows) {
    require_config(r.size() == m, "worst-case solver: row/support dimension mismatch");
    require_config(support.contains(r, 1e-9), "worst-case solver: sample outside support box");
  }
  require_config(eps >= 0.0, "worst-case solver: negative radius");

  const double inv_n = 1.0 / static_cast<double>(n);
  auto objective = [&](const std::vector<Vec>& ys) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += eval(k, ys[k]);
    return acc / static_cast<double>(n);
  };

  ScenarioSolution out;
  if (eps == 0.0) {
    out.scenarios = rows;
    out.value = objective(rows);
    out.budget = 0.0;
    out.converged = true;
    require(std::fabs(out.value) <= kDivergenceGuard, "worst-case solver: value diverged");
    return out;
  }

  const double budget = static_cast<double>(n) * eps;
  std::vector<Vec> y = rows;
  if (warm != nullptr && warm->scenarios.size() == n && !warm->scenarios.empty() &&
      warm->scenarios[0].size() == m) {
    y = project_scenarios(warm->scenarios, rows, budget, support, opts.dykstra_sweeps);
  }

  auto stacked_gradient = [&](const std::vector<Vec>& ys) {
    std::vector<Vec> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = scale(grad(k, ys[k]), inv_n);
    return g;
  };

  // Base step: feasible-set scale over initial gradient magnitude.
  double step_base = opts.step_scale;
  if (step_base <= 0.0) {
    const double diam = std::min(2.0 * budget,
                                 support.diameter() * std::sqrt(static_cast<double>(n)));
    const double g0 = norm2(stack(stacked_gradient(y)));
    step_base = (g0 > 1e-12) ? std::max(diam, 1e-6) / g0 : 1.0;
  }

  double best_value = objective(y);
  std::vector<Vec> best = y;
  int since_improvement = 0;
  const double improve_tol = opts.tol * 1e-3;
  int t = 0;
  for (t = 1; t <= opts.max_iters; ++t) {
    const std::vector<Vec> g = stacked_gradient(y);
    const double step = step_base / std::sqrt(static_cast<double>(t));
    std::vector<Vec> next(n);
    for (std::size_t k = 0; k < n; ++k) next[k] = axpy(y[k], -step, g[k]);
    next = project_scenarios(next, rows, budget, support, opts.dykstra_sweeps);
    const double value = objective(next);
    require(std::fabs(value) <= kDivergenceGuard, "worst-case solver: value diverged");
    if (value < best_value - improve_tol * std::max(1.0, std::fabs(best_value))) {
      best_value = value;
      best = next;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    double moved = 0.0;
    for (std::size_t k = 0; k < n; ++k) moved = std::max(moved, dist_inf(next[k], y[k]));
    y = std::move(next);
    if (moved <= 1e-14 || since_improvement >= opts.stall_window) {
      out.converged = true;
      break;
    }
  }
  if (objective(y) < best_value) {
    best_value = objective(y);
    best = y;
  }
  out.scenarios = std::move(best);
  out.value = best_value;
  out.budget = 0.0;
  for (std::size_t k = 0; k < n; ++k) out.budget += norm1(sub(rows[k], out.scenarios[k]));
  require(out.budget <= budget * (1.0 + 1e-12) + 1e-15,
          "worst-case solver: transport budget violated");
  out.iterations = std::min(t, opts.max_iters);
  return out;
}

double sample_average_value(const Game& game, int agent, const Profile& s,
                            const std::vector<Vec>& rows) {
  require(!rows.empty(), "sample average: no rows");
  double acc = 0.0;
  for (const Vec& r : rows) acc += utility_eval(game, agent, s, r);
  return acc / static_cast<double>(rows.size());
}

ScenarioSolution dro_value(const Game& game, int agent, const Profile& s,
                           const SampleSet& samples, double eps, const Box& support,
                           const DroOptions& opts, const ScenarioSolution* warm) {
  require_config(samples.dim() == game.noise_dim,
                 "dro_value: sample dimension must match the game noise dimension");
  require_config(support.dim() == game.noise_dim, "dro_value: support dimension mismatch");
  const auto eval = [&](std::size_t, const Vec& xi) { return utility_eval(game, agent, s, xi); };
  const auto grad = [&](std::size_t, const Vec& xi) {
    return noise_gradient(game, agent, s, xi);
  };
  return worst_case_scenarios(eval, grad, samples.rows, eps, support, opts, warm);
}

ScenarioSolution individual_dro_value(const Game& game, int agent, const Profile& s,
                                      const SampleSet& samples, double eps,
                                      const Box& slice_support, const DroOptions& opts,
                                      const ScenarioSolution* warm) {
  if (samples.slices.empty())
    return dro_value(game, agent, s, samples, eps, slice_support, opts, warm);
  const auto span = samples.slices[static_cast<std::size_t>(agent)];
  const std::size_t b = span.first, e = span.second;
  require_config(slice_support.dim() == e - b,
                 "individual_dro_value: support must cover the agent slice");
  const std::vector<Vec> rows = samples.rows_for_agent(agent);
  // Off-slice coordinates stay at their observed values.
  auto assemble = [&](std::size_t k, const Vec& xi_slice) {
    Vec full = samples.rows[k];
    for (std::size_t l = b; l < e; ++l) full[l] = xi_slice[l - b];
    return full;
  };
  const auto eval = [&](std::size_t k, const Vec& xi_slice) {
    return utility_eval(game, agent, s, assemble(k, xi_slice));
  };
  const auto grad = [&](std::size_t k, const Vec& xi_slice) {
    const Vec g = noise_gradient(game, agent, s, assemble(k, xi_slice));
    return Vec(g.begin() + static_cast<long>(b), g.begin() + static_cast<long>(e));
  };
  return worst_case_scenarios(eval, grad, rows, eps, slice_support, opts, warm);
}

Vec mean_worst_case_noise(const Game& game, int agent, const SampleSet& samples,
                          const ScenarioSolution& solution) {
  const std::size_t m = samples.dim();
  Vec mean_row(m, 0.0);
  for (const Vec& r : samples.rows)
    for (std::size_t l = 0; l < m; ++l) mean_row[l] += r[l];
  for (double& v : mean_row) v /= static_cast<double>(samples.count());
  const auto span = scenario_span(game, agent, samples, solution);
  const Vec ybar = solution.mean_scenario();
  for (std::size_t l = span.first; l < span.second; ++l) mean_row[l] = ybar[l - span.first];
  return mean_row;
}

GradientInterval dro_supergradient(const Game& game, int agent, const Profile& s,
                                   const SampleSet& samples, const ScenarioSolution& solution) {
  if (game.noise_dim == 0) return own_supergradient(game, agent, s, Vec{});
  const Vec xi = mean_worst_case_noise(game, agent, samples, solution);
  return own_supergradient(game, agent, s, xi);
}

Vec min_norm_supergradient(const GradientInterval& interval, const Vec& point, const Box& box,
                           double face_tol) {
  const std::size_t d = point.size();
  require(interval.lo.size() == d && interval.hi.size() == d && box.dim() == d,
          "min_norm_supergradient: dimension mismatch");
  Vec out(d);
  for (std::size_t l = 0; l < d; ++l) {
    const double a = interval.lo[l];
    const double b = interval.hi[l];
    require(a <= b, "min_norm_supergradient: malformed interval");
    const bool at_lower = point[l] <= box.lower[l] + face_tol;
    const bool at_upper = point[l] >= box.upper[l] - face_tol;
    double z;
    if (at_lower && at_upper) {
      // Degenerate coordinate: normal cone is the whole line, the residual is
      // always zero, pick the smallest-magnitude supergradient component.
      z = std::min(std::max(0.0, a), b);
    } else if (at_lower) {
      // Cone (-inf, 0]: negative components are absorbed exactly.
      z = (a > 0.0) ? a : std::min(b, 0.0);
    } else if (at_upper) {
      // Cone [0, inf): positive components are absorbed exactly.
      z = (b < 0.0) ? b : std::max(a, 0.0);
    } else {
      // Interior: cone {0}; closest interval point to zero.
      z = std::min(std::max(0.0, a), b);
    }
    out[l] = z;
  }
  return out;
}

}  // namespace drone
