// Ambiguity-set machinery: finite-sample radius schedule for Wasserstein
// balls around empirical distributions, radius inflation for estimated
// opponents, the equilibrium-quality bound it induces, and an exact
// transportation-problem solver for distances between small discrete
// distributions (the test oracle for everything radius-related).
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "drone/common.hpp"
#include "drone/game.hpp"

namespace drone {

// Concentration constants used by the radius schedule. Defaults follow the
// usual light-tail normalization.
struct AmbiguitySpec {
  double c1 = 1.0;       // leading concentration constant (> 0)
  double c2 = 1.0;       // exponential rate constant (> 0)
  double a = 2.0;        // tail exponent (> 1)
  double theta = 0.05;   // per-agent confidence level in (0, 1)

  void validate() const;
};

// Radius guaranteeing that the true distribution lies within the ball around
// the empirical distribution of N i.i.d. samples in dimension m, with
// probability at least 1 - theta:
//   radius = (log(c1/theta) / (c2 N))^{1/max(m,2)}   if N >= log(c1/theta)/c2
//            (log(c1/theta) / (c2 N))^{1/a}          otherwise.
double wasserstein_radius(std::size_t num_samples, std::size_t dim, const AmbiguitySpec& spec);

// Ball inflation absorbing estimation error in the data the ball is built
// from: radius -> (1 + estimation_constant) * radius. The constant is 0 when
// the ball is centered on exact observations.
double inflate_radius(double radius, double estimation_constant);

// Upper bound on the equilibrium residual of a robust equilibrium evaluated
// under the true expected utilities:
//   2 * (1 + estimation_constant) * max_i radius_i * lipschitz_i.
double eta_bound(const Vec& radii, const Vec& lipschitz, double estimation_constant = 0.0);

// Discrete distribution: weighted atoms in R^m. Weights are nonnegative and
// sum to one (validated).
struct DiscreteDistribution {
  std::vector<Vec> atoms;
  Vec weights;

  void validate() const;
  std::size_t dim() const { return atoms.empty() ? 0 : atoms[0].size(); }
  Vec mean() const;
  static DiscreteDistribution uniform(std::vector<Vec> atoms);
};

// Sample container. In shared mode all agents see each full sample row; in
// individual mode agent i observes the coordinate slice [begin_i, end_i) of
// each row (slices partition the full coordinate range).
struct SampleSet {
  std::vector<Vec> rows;                            // N x m
  std::vector<std::pair<std::size_t, std::size_t>> slices;  // per agent, half-open

  std::size_t count() const { return rows.size(); }
  std::size_t dim() const { return rows.empty() ? 0 : rows[0].size(); }
  bool individual() const { return !slices.empty(); }
  void validate(std::size_t agents) const;
  // Rows restricted to agent's slice (the full rows in shared mode).
  std::vector<Vec> rows_for_agent(int agent) const;
  std::size_t dim_for_agent(int agent) const;
};

// Empirical distribution of the (sliced) samples: uniform weights 1/N.
DiscreteDistribution empirical_center(const SampleSet& samples, int agent = -1);

// Exact type-1 Wasserstein distance between two discrete distributions under
// the given ground metric (l1 by default, the metric used by the radius
// machinery; Euclidean available for diagnostics). Solved as a transportation
// problem by successive shortest augmenting paths; intended for small
// instances (up to 64 x 64 atoms).
enum class GroundMetric { L1, Euclidean };
double discrete_wasserstein(const DiscreteDistribution& p, const DiscreteDistribution& q,
                            GroundMetric metric = GroundMetric::L1);

}  // namespace drone
