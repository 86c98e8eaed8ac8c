// Core game types: box-constrained strategy sets, per-agent utility
// specifications (a few closed-form families plus a user-supplied hook),
// strategy profiles, utility evaluation, own-block supergradients, and a
// brute-force grid oracle for the best-response residual of a profile.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "drone/common.hpp"

namespace drone {

// Axis-aligned box [lower, upper] in R^d; the strategy set of one agent.
struct Box {
  Vec lower;
  Vec upper;

  static Box make(Vec lo, Vec up);  // validates lo <= up componentwise
  std::size_t dim() const { return lower.size(); }
  double diameter() const;                // Euclidean diameter ||upper-lower||
  bool contains(const Vec& x, double tol = 0.0) const;
  Vec clamp(const Vec& x) const;          // Euclidean projection onto the box
  Vec midpoint() const;
  double max_abs() const;                 // max over the box of |coordinate|
  Vec sample(Rng& rng) const;             // uniform draw
};

// Euclidean projection of x onto a box (free-function form used everywhere).
Vec project_box(const Vec& x, const Box& box);

// Joint strategy profile: one block per agent.
struct Profile {
  std::vector<Vec> blocks;

  std::size_t agents() const { return blocks.size(); }
  Vec flatten() const;
  static Profile unflatten(const Vec& x, const std::vector<Box>& boxes);
};

double profile_dist_inf(const Profile& a, const Profile& b);

// Componentwise supergradient interval [lo_l, hi_l] of a concave function of
// the agent's own block. Smooth points carry lo == hi. Intervals arise at the
// kinks of the absolute-value family.
struct GradientInterval {
  Vec lo;
  Vec hi;

  bool singleton(double tol = 0.0) const;
  // Element of the interval product with minimum Euclidean norm
  // (componentwise clamp of zero onto [lo, hi]).
  Vec min_norm_point() const;
};

enum class UtilityFamily {
  WeightedAbsProduct,   // U_i = -w_i |s_i - t_i| * prod_{j != i} s_j   (scalar agents)
  PureProduct,          // U_i = prod_j s_j                             (scalar agents)
  Quadratic,            // U_i = -sum_l q_{i,l} (s_{i,l} - t_{i,l})^2
  AffineNoiseQuadratic, // U_i = -q_i (s_i-t_i)^2 + s_i (r_i . xi) + g_i s_i sum_{j!=i} s_j
  UserSupplied,
};

UtilityFamily utility_family_from_string(const std::string& name);
std::string utility_family_to_string(UtilityFamily family);

// Per-agent utility description. Field use depends on the family; see the
// evaluation code for the exact formulas. Vector-valued own blocks are
// supported by the quadratic family only; the product and noise-coupled
// families require every agent to hold a scalar strategy.
struct UtilitySpec {
  UtilityFamily family = UtilityFamily::Quadratic;
  int agent = 0;             // own index i
  double weight = 1.0;       // w_i  (WeightedAbsProduct)
  Vec target;                // t_i  (WeightedAbsProduct: size 1; Quadratic: own dim)
  Vec quad;                  // q_i  (Quadratic: own dim; AffineNoiseQuadratic: size 1)
  Vec noise_coeff;           // r_i  (AffineNoiseQuadratic: length = noise dim)
  double coupling = 0.0;     // g_i  (AffineNoiseQuadratic)

  // UserSupplied hooks. eval(profile, xi) -> value; grad(profile, xi) -> own
  // supergradient interval. The bound/lipschitz fields must then be provided.
  std::function<double(const Profile&, const Vec&)> user_eval;
  std::function<GradientInterval(const Profile&, const Vec&)> user_grad;
  double user_grad_bound = 0.0;    // B_i for UserSupplied
  double user_lipschitz = 0.0;     // L_i (value Lipschitz in xi, l1 metric)
  std::optional<double> user_amicability;  // c_i override for UserSupplied
};

// A complete game: per-agent boxes and utilities, plus the dimension of the
// random parameter vector (0 for deterministic games).
struct Game {
  std::vector<Box> boxes;
  std::vector<UtilitySpec> utilities;
  std::size_t noise_dim = 0;

  std::size_t agents() const { return boxes.size(); }
  void validate() const;     // family/dimension coherence checks
};

// U_i(profile; xi). For noise-free families xi may be empty.
double utility_eval(const Game& game, int agent, const Profile& s, const Vec& xi);

// Supergradient interval of U_i with respect to the agent's own block at s.
// Kinks are detected with an absolute tolerance on the kink coordinate.
GradientInterval own_supergradient(const Game& game, int agent, const Profile& s,
                                   const Vec& xi, double kink_tol = 1e-12);

// Gradient of U_i with respect to xi at fixed profile (used by the
// worst-case-distribution solver; defined for families affine in the noise,
// and identically zero for noise-free families).
Vec noise_gradient(const Game& game, int agent, const Profile& s, const Vec& xi);

// Conservative bound B_i on ||own supergradient|| over the strategy boxes
// (and over the noise support box when one is given).
double supergradient_bound(const Game& game, int agent, const Box* noise_support);

// Value Lipschitz constant L_i of xi -> U_i(s; xi) in the l1 metric, uniform
// over the strategy boxes.
double noise_lipschitz(const Game& game, int agent, const Box* noise_support);

// Default curvature-coupling constant c_i for a family (amicability default).
// Product families use the largest cross slope over the boxes; quadratic
// families use twice the largest own curvature.
double default_amicability(const Game& game, int agent);

// ----- best-response residual oracle -----

// Evaluator abstraction: value of agent `i`'s objective at a joint profile.
// For plain games this is utility_eval with a fixed noise realization; for
// robust objectives the caller wraps the worst-case value.
using ObjectiveFn = std::function<double(int agent, const Profile& s)>;

// Max over agents of (best unilateral improvement on a uniform grid of the
// mover's box), floored at 0. grid_points is the number of points per
// dimension (own blocks of dimension > 2 are rejected: the oracle is a
// brute-force instrument for small problems).
double best_response_residual(const std::vector<Box>& boxes, const ObjectiveFn& value,
                              const Profile& s, int grid_points = 201);

// Same residual restricted to a single agent (used by diagnostics).
double best_response_residual_agent(const std::vector<Box>& boxes, const ObjectiveFn& value,
                                    const Profile& s, int agent, int grid_points = 201);

// Convenience: residual for a deterministic game (utility_eval with fixed xi).
double best_response_residual_game(const Game& game, const Profile& s, const Vec& xi,
                                   int grid_points = 201);

}  // namespace drone
