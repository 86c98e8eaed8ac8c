#include "drone/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "drone/dro.hpp"

namespace drone {

namespace {

double joint_diameter(const std::vector<Box>& boxes) {
  double acc = 0.0;
  for (const Box& b : boxes) {
    const double d = b.diameter();
    acc += d * d;
  }
  return std::sqrt(acc);
}

double joint_norm_bound(const std::vector<Box>& boxes) {
  double acc = 0.0;
  for (const Box& b : boxes)
    for (std::size_t l = 0; l < b.dim(); ++l) {
      const double m = std::max(std::fabs(b.lower[l]), std::fabs(b.upper[l]));
      acc += m * m;
    }
  return std::sqrt(acc);
}

std::string interval_text(double lo, double hi, bool hi_open) {
  std::ostringstream os;
  os << "(" << format_double(lo) << ", " << (hi_open ? format_double(hi) : "inf") << (hi_open ? ")" : ")");
  return os.str();
}

}  // namespace

double AlgoParams::alpha_min() const {
  double m = alpha.empty() ? 0.0 : alpha[0];
  for (double a : alpha) m = std::min(m, a);
  return m;
}

double AlgoParams::alpha_max() const {
  double m = 0.0;
  for (double a : alpha) m = std::max(m, a);
  return m;
}

double AlgoParams::mu_max() const {
  double m = 0.0;
  for (double x : mu) m = std::max(m, x);
  return m;
}

AlgoParams make_params(std::size_t agents, double alpha, double mu, double lambda, double kappa,
                       const Vec& amicability, const std::vector<Box>& boxes) {
  AlgoParams p;
  p.alpha.assign(agents, alpha);
  p.mu.assign(agents, mu);
  p.lambda.assign(agents, lambda);
  p.kappa.assign(agents, kappa);
  require_config(amicability.size() == agents || amicability.size() == 1,
                 "make_params: amicability list must have one entry or one per agent");
  p.amicability = (amicability.size() == agents)
                      ? amicability
                      : Vec(agents, amicability.empty() ? 0.0 : amicability[0]);
  p.locality.assign(agents, joint_diameter(boxes));
  return p;
}

ValidityReport validate_params(const AlgoParams& params, const std::vector<Box>& boxes) {
  ValidityReport report;
  const std::size_t n = params.alpha.size();
  auto fail = [&](const std::string& msg) {
    report.ok = false;
    report.violations.push_back(msg);
  };
  if (params.mu.size() != n || params.lambda.size() != n || params.kappa.size() != n ||
      params.amicability.size() != n || params.locality.size() != n || boxes.size() != n) {
    fail("parameter lists and strategy boxes must all have one entry per agent");
    return report;
  }
  double d_min = params.locality.empty() ? 0.0 : params.locality[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (params.locality[i] <= 0.0)
      fail("agent " + std::to_string(i + 1) + ": interaction radius must be positive");
    d_min = std::min(d_min, params.locality[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string tag = "agent " + std::to_string(i + 1) + ": ";
    const double D = boxes[i].diameter();
    if (D <= 0.0) {
      fail(tag + "strategy box has zero diameter");
      continue;
    }
    const double alpha_cap = std::min(d_min / D, 0.5);
    if (!(params.alpha[i] > 0.0 && params.alpha[i] <= alpha_cap))
      fail(tag + "blending step " + format_double(params.alpha[i]) +
           " outside (0, " + format_double(alpha_cap) + "]");
    if (!(params.mu[i] > 0.0)) fail(tag + "supergradient scaling must be positive");
    if (!(params.kappa[i] > 1.0)) fail(tag + "slack factor must exceed 1");
    if (params.amicability[i] < 0.0) fail(tag + "coupling constant must be nonnegative");
    if (params.mu[i] > 0.0 && params.kappa[i] > 1.0) {
      const double c = params.amicability[i];
      if (c > 0.0) {
        const double lo = 1.0 / (params.kappa[i] * params.mu[i] * c);
        const double hi = 1.0 / (params.mu[i] * c);
        if (!(params.lambda[i] > lo && params.lambda[i] < hi))
          fail(tag + "inertial scaling " + format_double(params.lambda[i]) +
               " outside " + interval_text(lo, hi, true));
      } else {
        const double lo = 1.0 / (params.kappa[i] * params.mu[i]);
        if (!(params.lambda[i] > lo))
          fail(tag + "inertial scaling " + format_double(params.lambda[i]) +
               " outside " + interval_text(lo, 0.0, false));
      }
    }
  }
  return report;
}

Vec support_argmax(const Vec& phi, const Box& box) {
  require(phi.size() == box.dim(), "support_argmax: dimension mismatch");
  Vec vertex(phi.size());
  for (std::size_t l = 0; l < phi.size(); ++l)
    vertex[l] = (phi[l] > 0.0) ? box.upper[l] : box.lower[l];
  return vertex;
}

Vec compose_phi(double mu, const Vec& v, double lambda, const Vec& s, const Vec& s_prev) {
  require(v.size() == s.size() && s.size() == s_prev.size(), "compose_phi: dimension mismatch");
  require(lambda > 0.0, "compose_phi: inertial scaling must be positive");
  Vec phi(v.size());
  for (std::size_t l = 0; l < v.size(); ++l)
    phi[l] = mu * v[l] - (s[l] - s_prev[l]) / lambda;
  return phi;
}

DynamicsState init_dynamics(const Profile& start) {
  // The inertial term sees zero displacement on the first step.
  return DynamicsState{start, start, 0};
}

DynamicsState dynamics_step(const DynamicsState& state, const VField& field,
                            const AlgoParams& params, const std::vector<Box>& boxes,
                            StepInfo* info) {
  const std::size_t n = boxes.size();
  require(state.current.agents() == n, "dynamics_step: profile size mismatch");
  const std::vector<Vec> v = field(state.current);
  require(v.size() == n, "dynamics_step: field must return one direction per agent");
  DynamicsState next;
  next.previous = state.current;
  next.current.blocks.resize(n);
  next.step = state.step + 1;
  if (info != nullptr) {
    info->v = v;
    info->phi.resize(n);
    info->vertex.resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec phi = compose_phi(params.mu[i], v[i], params.lambda[i], state.current.blocks[i],
                                state.previous.blocks[i]);
    const Vec vertex = support_argmax(phi, boxes[i]);
    const double a = params.alpha[i];
    Vec s_next(vertex.size());
    for (std::size_t l = 0; l < vertex.size(); ++l)
      s_next[l] = (1.0 - a) * state.current.blocks[i][l] + a * vertex[l];
    require(boxes[i].contains(s_next, 1e-12), "dynamics_step: iterate left the strategy box");
    next.current.blocks[i] = std::move(s_next);
    if (info != nullptr) {
      info->phi[i] = phi;
      info->vertex[i] = vertex;
    }
  }
  return next;
}

double lyapunov_value(const Profile& s, const std::vector<Vec>& phi,
                      const std::vector<Box>& boxes) {
  require(s.agents() == boxes.size() && phi.size() == boxes.size(),
          "lyapunov_value: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const Vec vertex = support_argmax(phi[i], boxes[i]);
    total += dot(vertex, phi[i]) - dot(s.blocks[i], phi[i]);
  }
  return total;
}

double rho1(double x, double y) { return x - x * x + y; }

BoundConstants bound_constants(const AlgoParams& params, const Vec& grad_bounds,
                               const std::vector<Box>& boxes, double margin, const Vec& dbar,
                               double joint_reach) {
  const std::size_t n = boxes.size();
  require(params.alpha.size() == n && grad_bounds.size() == n, "bound_constants: size mismatch");
  require(margin > 0.0 && margin < 1.0, "bound_constants: margin must lie in (0,1)");
  BoundConstants out;
  out.margin = margin;
  out.reach.resize(n);
  out.unit_cost.resize(n);
  out.phi_bound.resize(n);
  double k_max = 0.0;
  double reach_max = 0.0;
  double excess_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double D = boxes[i].diameter();
    const double c_eff = params.amicability[i] > 0.0 ? params.amicability[i] : 1.0;
    out.reach[i] = 2.0 * grad_bounds[i] + D * params.kappa[i] * c_eff;
    const double db = dbar.empty() ? D : dbar[i];
    out.unit_cost[i] = std::max(D * D / params.lambda[i], out.reach[i] * db);
    out.phi_bound[i] = params.mu[i] * grad_bounds[i] + D / params.lambda[i];
    k_max = std::max(k_max, out.unit_cost[i]);
    reach_max = std::max(reach_max, out.reach[i]);
    excess_max = std::max(excess_max, out.reach[i] - grad_bounds[i]);
  }
  out.total_cost = static_cast<double>(n) * k_max;
  out.rho1_value = rho1(params.alpha_max(), params.mu_max());
  out.rho2_value = excess_max * params.alpha_max() * params.mu_max() + reach_max * params.mu_max();
  out.joint_reach = (joint_reach > 0.0) ? joint_reach : joint_norm_bound(boxes);
  const double floor = margin * params.alpha_min();
  require(floor > 0.0, "bound_constants: positive minimum blending step required");
  out.ceiling = out.total_cost * out.rho1_value / floor;
  out.ceiling_perturbed = (out.total_cost * out.rho1_value + out.joint_reach * out.rho2_value) / floor;
  return out;
}

double estimate_amicability(const Game& game, int agent, const Profile& base, double radius,
                            int probes, std::uint64_t seed, const Vec& xi) {
  require(radius > 0.0, "estimate_amicability: radius must be positive");
  Rng rng(seed);
  const std::size_t n = game.agents();
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    // Random joint perturbation, rescaled into the interaction ball and
    // clamped into the boxes.
    Profile moved = base;
    double norm_sq = 0.0;
    std::vector<Vec> deltas(n);
    for (std::size_t j = 0; j < n; ++j) {
      deltas[j].resize(game.boxes[j].dim());
      for (double& d : deltas[j]) d = uniform(rng, -1.0, 1.0);
    }
    double raw = 0.0;
    for (const Vec& d : deltas) raw += dot(d, d);
    raw = std::sqrt(raw);
    if (raw < 1e-12) continue;
    const double scale_factor = radius * uniform01(rng) / raw;
    for (std::size_t j = 0; j < n; ++j) {
      moved.blocks[j] = game.boxes[j].clamp(axpy(base.blocks[j], scale_factor, deltas[j]));
      const Vec diff = sub(moved.blocks[j], base.blocks[j]);
      norm_sq += dot(diff, diff);
    }
    if (norm_sq < 1e-20) continue;
    Profile others_moved = moved;
    others_moved.blocks[static_cast<std::size_t>(agent)] =
        base.blocks[static_cast<std::size_t>(agent)];
    Profile self_moved = base;
    self_moved.blocks[static_cast<std::size_t>(agent)] =
        moved.blocks[static_cast<std::size_t>(agent)];
    const Vec own_delta = sub(moved.blocks[static_cast<std::size_t>(agent)],
                              base.blocks[static_cast<std::size_t>(agent)]);
    const Vec z1 = own_supergradient(game, agent, base, xi).min_norm_point();
    const Vec z2 = own_supergradient(game, agent, others_moved, xi).min_norm_point();
    const Vec z3 = own_supergradient(game, agent, self_moved, xi).min_norm_point();
    const double numerator = dot(sub(z2, z1), own_delta) - dot(sub(z3, z1), own_delta);
    worst = std::max(worst, numerator / norm_sq);
  }
  return worst;
}

}  // namespace drone
