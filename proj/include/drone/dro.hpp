// Worst-case expected-utility oracle over a transport-metric ball around the
// empirical sample distribution. The ball constraint is the scenario program:
// one decision vector per sample, a shared l1 transport budget, and box
// support bounds. Solved with a projected subgradient method whose projection
// (box intersected with l1 ball) is computed by Dykstra alternation.
#pragma once

#include <functional>
#include <optional>

#include "drone/ambiguity.hpp"
#include "drone/common.hpp"
#include "drone/game.hpp"

namespace drone {

struct DroOptions {
  int max_iters = 5000;
  double tol = 1e-6;           // relative objective-improvement stall tolerance
  double step_scale = 0.0;     // base step c in c/sqrt(t); 0 = auto from data
  int dykstra_sweeps = 50;     // alternation sweeps for the intersection projection
  int stall_window = 50;       // iterations without improvement before stopping
};

// Solution of the scenario program at one strategy profile.
struct ScenarioSolution {
  std::vector<Vec> scenarios;  // one worst-case vector per sample row
  double value = 0.0;          // (1/N) sum_k U(s; y^k) at the minimizer
  double budget = 0.0;         // sum_k ||h^k - y^k||_1 (feasible: <= N * eps)
  int iterations = 0;
  bool converged = false;

  Vec mean_scenario() const;
};

// Per-scenario objective callbacks: value and gradient of xi -> U(s; xi)
// where the row index identifies which sample the scenario replaces.
using ScenarioEval = std::function<double(std::size_t row, const Vec& xi)>;
using ScenarioGrad = std::function<Vec(std::size_t row, const Vec& xi)>;

// Minimize (1/N) sum_k U_k(y^k) subject to sum_k ||rows[k]-y^k||_1 <= N*eps
// and y^k in support. Rows must lie inside the support box. eps = 0 returns
// the rows themselves (exact sample-average short circuit). `warm` seeds the
// iteration with a previous solution of compatible shape.
ScenarioSolution worst_case_scenarios(const ScenarioEval& eval, const ScenarioGrad& grad,
                                      const std::vector<Vec>& rows, double eps,
                                      const Box& support, const DroOptions& opts = {},
                                      const ScenarioSolution* warm = nullptr);

// Plain sample average (1/N) sum_k U(s; rows[k]).
double sample_average_value(const Game& game, int agent, const Profile& s,
                            const std::vector<Vec>& rows);

// Worst-case value for one agent over a ball centered at the full-sample
// empirical distribution (shared-sample mode).
ScenarioSolution dro_value(const Game& game, int agent, const Profile& s,
                           const SampleSet& samples, double eps, const Box& support,
                           const DroOptions& opts = {}, const ScenarioSolution* warm = nullptr);

// Worst-case value when agent i's ball only moves its own sample slice
// (individual-sample mode); off-slice coordinates stay at their observed
// values. The support box is the agent's slice of the full support.
ScenarioSolution individual_dro_value(const Game& game, int agent, const Profile& s,
                                      const SampleSet& samples, double eps,
                                      const Box& slice_support, const DroOptions& opts = {},
                                      const ScenarioSolution* warm = nullptr);

// Supergradient of the worst-case value with respect to the agent's own
// strategy block: the own-utility supergradient evaluated at the average
// worst-case scenario. `samples` supplies the off-slice coordinates in
// individual mode (pass the same set used to produce the solution).
GradientInterval dro_supergradient(const Game& game, int agent, const Profile& s,
                                   const SampleSet& samples, const ScenarioSolution& solution);

// Assembled mean worst-case noise vector (full dimension): mean sample row
// with the agent's slice replaced by the mean of the solution scenarios.
Vec mean_worst_case_noise(const Game& game, int agent, const SampleSet& samples,
                          const ScenarioSolution& solution);

// Normal-cone-adjusted steepest feasible supergradient: the gradient part of
// the minimum-norm element of { -zeta + z : zeta in interval, z in N(point) }
// where N is the normal cone of the box at the point. Componentwise closed
// form; ties in the residual are broken toward the smallest |zeta|.
Vec min_norm_supergradient(const GradientInterval& interval, const Vec& point, const Box& box,
                           double face_tol = 0.0);

// Projection onto { y : y in box (per row), sum_k ||rows[k]-y^k||_1 <= budget }
// by Dykstra alternation on the stacked vector, followed by an exact
// feasibility repair (box clamp, then shrink toward the center). Exposed for
// tests.
std::vector<Vec> project_scenarios(const std::vector<Vec>& point, const std::vector<Vec>& rows,
                                   double budget, const Box& support, int sweeps = 50);

// Projection of d onto the l1 ball of the given radius centered at 0
// (waterfilling soft-threshold, exact). Exposed for tests.
Vec project_l1_ball(const Vec& d, double radius);

}  // namespace drone
