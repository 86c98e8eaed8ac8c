// Centralized inertial supported better-response dynamics: each agent blends
// its strategy toward a vertex of its box chosen by a composite search
// direction (scaled steepest feasible supergradient plus an inertial term),
// with step sizes small enough that a supported-gap Lyapunov function decays
// into a computable neighborhood of the equilibrium set.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "drone/common.hpp"
#include "drone/game.hpp"

namespace drone {

// Per-agent algorithm parameters.
struct AlgoParams {
  Vec alpha;        // blending step in (0, min{d_min/D_i, 1/2}]
  Vec mu;           // supergradient scaling, > 0
  Vec lambda;       // inertial scaling, interval determined by kappa and amicability
  Vec kappa;        // slack factor > 1 shaping the admissible lambda interval
  Vec amicability;  // curvature-coupling constant c_i >= 0
  Vec locality;     // interaction radius d_i > 0 (full joint diameter by default)

  std::size_t agents() const { return alpha.size(); }
  double alpha_min() const;
  double alpha_max() const;
  double mu_max() const;
};

// Broadcast helper: scalar parameters -> per-agent vectors, with locality
// defaulting to the diameter of the joint strategy box.
AlgoParams make_params(std::size_t agents, double alpha, double mu, double lambda, double kappa,
                       const Vec& amicability, const std::vector<Box>& boxes);

struct ValidityReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// Checks every parameter against its admissible interval; collects one
// human-readable violation string per failure instead of throwing.
ValidityReport validate_params(const AlgoParams& params, const std::vector<Box>& boxes);

// Vertex of the box maximizing x . phi; zero components resolve to the lower
// bound so the selection is deterministic.
Vec support_argmax(const Vec& phi, const Box& box);

// Composite search direction phi = mu * v - (s - s_prev) / lambda.
Vec compose_phi(double mu, const Vec& v, double lambda, const Vec& s, const Vec& s_prev);

// Search-direction field: per-agent steepest feasible supergradients at a
// profile. Centralized runs evaluate utilities at the true profile; the
// networked variant substitutes estimated profiles per agent.
using VField = std::function<std::vector<Vec>(const Profile&)>;

struct DynamicsState {
  Profile current;
  Profile previous;
  long step = 0;
};

DynamicsState init_dynamics(const Profile& start);

// Diagnostics captured by one step.
struct StepInfo {
  std::vector<Vec> v;       // supergradient field at the pre-step profile
  std::vector<Vec> phi;     // composite directions
  std::vector<Vec> vertex;  // chosen box vertices
};

// One synchronous step of the dynamics; all agents move simultaneously from
// the same pre-step profile.
DynamicsState dynamics_step(const DynamicsState& state, const VField& field,
                            const AlgoParams& params, const std::vector<Box>& boxes,
                            StepInfo* info = nullptr);

// Supported-gap Lyapunov function: sum_i [max_{x in S_i} x . phi_i - s_i . phi_i].
double lyapunov_value(const Profile& s, const std::vector<Vec>& phi,
                      const std::vector<Box>& boxes);

// Decrement shaping function: rho1(x, y) = x - x^2 + y.
double rho1(double x, double y);

// Convergence-bound constants derived from parameters and per-agent
// supergradient bounds. dbar_i defaults to the box diameter; joint_reach is
// any upper bound on the norm of a joint profile (defaults to the exact max
// over the joint box).
struct BoundConstants {
  Vec reach;                      // A_i = 2 B_i + D_i kappa_i max(c_i, eff)
  Vec unit_cost;                  // K_i = max{D_i^2 / lambda_i, A_i dbar_i}
  double total_cost = 0.0;        // K = n * max_i K_i
  double rho1_value = 0.0;        // rho1(alpha_max, mu_max)
  double rho2_value = 0.0;        // disturbance gain for the networked variant
  double joint_reach = 0.0;       // J >= max_{x in S} ||x||
  double margin = 0.5;            // fraction of the decrement kept as margin
  double ceiling = 0.0;           // K rho1 / (margin * alpha_min)
  double ceiling_perturbed = 0.0; // (K rho1 + J rho2) / (margin * alpha_min)
  Vec phi_bound;                  // mu_i B_i + D_i / lambda_i
};

BoundConstants bound_constants(const AlgoParams& params, const Vec& grad_bounds,
                               const std::vector<Box>& boxes, double margin = 0.5,
                               const Vec& dbar = {}, double joint_reach = 0.0);

// Sampled estimate of the curvature-coupling constant: maximum over random
// profile perturbations within the interaction radius of the defining ratio.
// Diagnostic only; configured constants take precedence.
double estimate_amicability(const Game& game, int agent, const Profile& base, double radius,
                            int probes, std::uint64_t seed, const Vec& xi = {});

}  // namespace drone
