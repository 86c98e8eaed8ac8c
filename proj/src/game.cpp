#include "drone/game.hpp"

#include <algorithm>
#include <cmath>

namespace drone {

namespace {

// Product of all scalar opponent strategies (families that need it validate
// that every block is one-dimensional).
double opponent_product(const Profile& s, int agent) {
  double p = 1.0;
  for (std::size_t j = 0; j < s.blocks.size(); ++j) {
    if (static_cast<int>(j) == agent) continue;
    p *= s.blocks[j][0];
  }
  return p;
}

double opponent_sum(const Profile& s, int agent) {
  double acc = 0.0;
  for (std::size_t j = 0; j < s.blocks.size(); ++j) {
    if (static_cast<int>(j) == agent) continue;
    acc += s.blocks[j][0];
  }
  return acc;
}

// Maximum of |r . xi| over a box support.
double max_abs_linear(const Vec& r, const Box& support) {
  double hi = 0.0, lo = 0.0;
  for (std::size_t l = 0; l < r.size(); ++l) {
    hi += std::max(r[l] * support.lower[l], r[l] * support.upper[l]);
    lo += std::min(r[l] * support.lower[l], r[l] * support.upper[l]);
  }
  return std::max(std::fabs(hi), std::fabs(lo));
}

Vec linspace(double lo, double hi, int count) {
  Vec pts(static_cast<std::size_t>(count));
  if (count == 1) {
    pts[0] = 0.5 * (lo + hi);
    return pts;
  }
  for (int k = 0; k < count; ++k)
    pts[static_cast<std::size_t>(k)] = lo + (hi - lo) * static_cast<double>(k) / (count - 1);
  return pts;
}

}  // namespace

Box Box::make(Vec lo, Vec up) {
  require_config(!lo.empty(), "box: empty bounds");
  require_config(lo.size() == up.size(), "box: bound dimension mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i)
    require_config(lo[i] <= up[i], "box: lower bound exceeds upper bound");
  return Box{std::move(lo), std::move(up)};
}

double Box::diameter() const { return dist2(upper, lower); }

bool Box::contains(const Vec& x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
  return true;
}

Vec Box::clamp(const Vec& x) const {
  require(x.size() == lower.size(), "box clamp: dimension mismatch");
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    r[i] = std::min(std::max(x[i], lower[i]), upper[i]);
  return r;
}

Vec Box::midpoint() const {
  Vec r(lower.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.5 * (lower[i] + upper[i]);
  return r;
}

double Box::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < lower.size(); ++i)
    m = std::max(m, std::max(std::fabs(lower[i]), std::fabs(upper[i])));
  return m;
}

Vec Box::sample(Rng& rng) const {
  Vec r(lower.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = uniform(rng, lower[i], upper[i]);
  return r;
}

Vec project_box(const Vec& x, const Box& box) { return box.clamp(x); }

Vec Profile::flatten() const {
  Vec out;
  for (const Vec& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

Profile Profile::unflatten(const Vec& x, const std::vector<Box>& boxes) {
  Profile p;
  std::size_t pos = 0;
  for (const Box& b : boxes) {
    require(pos + b.dim() <= x.size(), "unflatten: vector too short");
    p.blocks.emplace_back(x.begin() + static_cast<long>(pos),
                          x.begin() + static_cast<long>(pos + b.dim()));
    pos += b.dim();
  }
  require(pos == x.size(), "unflatten: vector too long");
  return p;
}

double profile_dist_inf(const Profile& a, const Profile& b) {
  require(a.agents() == b.agents(), "profile distance: agent count mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i)
    m = std::max(m, dist_inf(a.blocks[i], b.blocks[i]));
  return m;
}

bool GradientInterval::singleton(double tol) const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (hi[i] - lo[i] > tol) return false;
  return true;
}

Vec GradientInterval::min_norm_point() const {
  Vec r(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i)
    r[i] = std::min(std::max(0.0, lo[i]), hi[i]);
  return r;
}

UtilityFamily utility_family_from_string(const std::string& name) {
  if (name == "weighted-abs-product") return UtilityFamily::WeightedAbsProduct;
  if (name == "pure-product") return UtilityFamily::PureProduct;
  if (name == "quadratic") return UtilityFamily::Quadratic;
  if (name == "affine-noise-quadratic") return UtilityFamily::AffineNoiseQuadratic;
  if (name == "user") return UtilityFamily::UserSupplied;
  throw ConfigError("unknown utility family: " + name);
}

std::string utility_family_to_string(UtilityFamily family) {
  switch (family) {
    case UtilityFamily::WeightedAbsProduct: return "weighted-abs-product";
    case UtilityFamily::PureProduct: return "pure-product";
    case UtilityFamily::Quadratic: return "quadratic";
    case UtilityFamily::AffineNoiseQuadratic: return "affine-noise-quadratic";
    case UtilityFamily::UserSupplied: return "user";
  }
  return "unknown";
}

void Game::validate() const {
  require_config(!boxes.empty(), "game: no agents");
  require_config(boxes.size() == utilities.size(), "game: boxes/utilities size mismatch");
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    const UtilitySpec& u = utilities[i];
    require_config(u.agent == static_cast<int>(i), "game: utility agent index out of order");
    const std::size_t own = boxes[i].dim();
    switch (u.family) {
      case UtilityFamily::WeightedAbsProduct:
        require_config(u.target.size() == 1, "weighted-abs-product: needs one target");
        require_config(u.weight >= 0.0, "weighted-abs-product: weight must be nonnegative");
        for (const Box& b : boxes)
          require_config(b.dim() == 1, "weighted-abs-product: all strategies must be scalar");
        break;
      case UtilityFamily::PureProduct:
        for (const Box& b : boxes)
          require_config(b.dim() == 1, "pure-product: all strategies must be scalar");
        break;
      case UtilityFamily::Quadratic:
        require_config(u.target.size() == own && u.quad.size() == own,
                       "quadratic: target/curvature sizes must match own dimension");
        for (double q : u.quad) require_config(q >= 0.0, "quadratic: curvature must be nonnegative");
        break;
      case UtilityFamily::AffineNoiseQuadratic:
        require_config(u.target.size() == 1 && u.quad.size() == 1,
                       "affine-noise-quadratic: scalar target and curvature required");
        require_config(u.quad[0] >= 0.0, "affine-noise-quadratic: curvature must be nonnegative");
        require_config(u.noise_coeff.size() == noise_dim,
                       "affine-noise-quadratic: noise coefficient length must equal noise dimension");
        for (const Box& b : boxes)
          require_config(b.dim() == 1, "affine-noise-quadratic: all strategies must be scalar");
        break;
      case UtilityFamily::UserSupplied:
        require_config(static_cast<bool>(u.user_eval) && static_cast<bool>(u.user_grad),
                       "user utility: eval and grad hooks required");
        require_config(u.user_grad_bound > 0.0, "user utility: positive gradient bound required");
        break;
    }
  }
}

double utility_eval(const Game& game, int agent, const Profile& s, const Vec& xi) {
  require(agent >= 0 && agent < static_cast<int>(game.agents()), "utility_eval: bad agent");
  require(s.agents() == game.agents(), "utility_eval: profile size mismatch");
  const UtilitySpec& u = game.utilities[static_cast<std::size_t>(agent)];
  switch (u.family) {
    case UtilityFamily::WeightedAbsProduct: {
      const double si = s.blocks[static_cast<std::size_t>(agent)][0];
      return -u.weight * std::fabs(si - u.target[0]) * opponent_product(s, agent);
    }
    case UtilityFamily::PureProduct: {
      double p = 1.0;
      for (const Vec& b : s.blocks) p *= b[0];
      return p;
    }
    case UtilityFamily::Quadratic: {
      const Vec& si = s.blocks[static_cast<std::size_t>(agent)];
      double acc = 0.0;
      for (std::size_t l = 0; l < si.size(); ++l) {
        const double d = si[l] - u.target[l];
        acc -= u.quad[l] * d * d;
      }
      return acc;
    }
    case UtilityFamily::AffineNoiseQuadratic: {
      const double si = s.blocks[static_cast<std::size_t>(agent)][0];
      const double d = si - u.target[0];
      require(xi.size() == game.noise_dim, "utility_eval: noise vector dimension mismatch");
      return -u.quad[0] * d * d + si * dot(u.noise_coeff, xi) + u.coupling * si * opponent_sum(s, agent);
    }
    case UtilityFamily::UserSupplied:
      return u.user_eval(s, xi);
  }
  throw InvariantError("utility_eval: unreachable");
}

GradientInterval own_supergradient(const Game& game, int agent, const Profile& s,
                                   const Vec& xi, double kink_tol) {
  const UtilitySpec& u = game.utilities[static_cast<std::size_t>(agent)];
  switch (u.family) {
    case UtilityFamily::WeightedAbsProduct: {
      const double si = s.blocks[static_cast<std::size_t>(agent)][0];
      const double p = u.weight * opponent_product(s, agent);
      if (std::fabs(si - u.target[0]) > kink_tol) {
        const double g = (si > u.target[0]) ? -p : p;
        return GradientInterval{{g}, {g}};
      }
      return GradientInterval{{-std::fabs(p)}, {std::fabs(p)}};
    }
    case UtilityFamily::PureProduct: {
      const double g = opponent_product(s, agent);
      return GradientInterval{{g}, {g}};
    }
    case UtilityFamily::Quadratic: {
      const Vec& si = s.blocks[static_cast<std::size_t>(agent)];
      Vec g(si.size());
      for (std::size_t l = 0; l < si.size(); ++l)
        g[l] = -2.0 * u.quad[l] * (si[l] - u.target[l]);
      return GradientInterval{g, g};
    }
    case UtilityFamily::AffineNoiseQuadratic: {
      const double si = s.blocks[static_cast<std::size_t>(agent)][0];
      require(xi.size() == game.noise_dim, "own_supergradient: noise vector dimension mismatch");
      const double g = -2.0 * u.quad[0] * (si - u.target[0]) + dot(u.noise_coeff, xi) +
                       u.coupling * opponent_sum(s, agent);
      return GradientInterval{{g}, {g}};
    }
    case UtilityFamily::UserSupplied:
      return u.user_grad(s, xi);
  }
  throw InvariantError("own_supergradient: unreachable");
}

Vec noise_gradient(const Game& game, int agent, const Profile& s, const Vec& xi) {
  (void)xi;
  const UtilitySpec& u = game.utilities[static_cast<std::size_t>(agent)];
  switch (u.family) {
    case UtilityFamily::AffineNoiseQuadratic:
      return scale(u.noise_coeff, s.blocks[static_cast<std::size_t>(agent)][0]);
    case UtilityFamily::WeightedAbsProduct:
    case UtilityFamily::PureProduct:
    case UtilityFamily::Quadratic:
      return Vec(game.noise_dim, 0.0);
    case UtilityFamily::UserSupplied:
      throw InvariantError("noise_gradient: not available for user-supplied utilities");
  }
  throw InvariantError("noise_gradient: unreachable");
}

double supergradient_bound(const Game& game, int agent, const Box* noise_support) {
  const UtilitySpec& u = game.utilities[static_cast<std::size_t>(agent)];
  switch (u.family) {
    case UtilityFamily::WeightedAbsProduct:
    case UtilityFamily::PureProduct: {
      double p = (u.family == UtilityFamily::WeightedAbsProduct) ? u.weight : 1.0;
      for (std::size_t j = 0; j < game.boxes.size(); ++j) {
        if (static_cast<int>(j) == agent) continue;
        p *= game.boxes[j].max_abs();
      }
      return p;
    }
    case UtilityFamily::Quadratic: {
      const Box& b = game.boxes[static_cast<std::size_t>(agent)];
      double acc = 0.0;
      for (std::size_t l = 0; l < b.dim(); ++l) {
        const double reach =
            std::max(std::fabs(b.upper[l] - u.target[l]), std::fabs(b.lower[l] - u.target[l]));
        const double g = 2.0 * u.quad[l] * reach;
        acc += g * g;
      }
      return std::sqrt(acc);
    }
    case UtilityFamily::AffineNoiseQuadratic: {
      const Box& b = game.boxes[static_cast<std::size_t>(agent)];
      const double reach =
          std::max(std::fabs(b.upper[0] - u.target[0]), std::fabs(b.lower[0] - u.target[0]));
      double bound = 2.0 * u.quad[0] * reach;
      if (game.noise_dim > 0) {
        require(noise_support != nullptr,
                "supergradient_bound: noise support required for noise-coupled family");
        bound += max_abs_linear(u.noise_coeff, *noise_support);
      }
      double cross = 0.0;
      for (std::size_t j = 0; j < game.boxes.size(); ++j) {
        if (static_cast<int>(j) == agent) continue;
        cross += game.boxes[j].max_abs();
      }
      return bound + std::fabs(u.coupling) * cross;
    }
    case UtilityFamily::UserSupplied:
      return u.user_grad_bound;
  }
  throw InvariantError("supergradient_bound: unreachable");
}

double noise_lipschitz(const Game& game, int agent, const Box* noise_support) {
  (void)noise_support;
  const UtilitySpec& u = game.utilities[static_cast<std::size_t>(agent)];
  switch (u.family) {
    case UtilityFamily::WeightedAbsProduct:
    case UtilityFamily::PureProduct:
    case UtilityFamily::Quadratic:
      return 0.0;
    case UtilityFamily::AffineNoiseQuadratic:
      return game.boxes[static_cast<std::size_t>(agent)].max_abs() * norm_inf(u.noise_coeff);
    case UtilityFamily::UserSupplied:
      return u.user_lipschitz;
  }
  throw InvariantError("noise_lipschitz: unreachable");
}

double default_amicability(const Game& game, int agent) {
  const UtilitySpec& u = game.utilities[static_cast<std::size_t>(agent)];
  const std::size_t n = game.agents();
  switch (u.family) {
    case UtilityFamily::Quadratic: {
      double q = 0.0;
      for (double v : u.quad) q = std::max(q, v);
      return 2.0 * q;
    }
    case UtilityFamily::AffineNoiseQuadratic:
      return 2.0 * u.quad[0] +
             0.5 * std::fabs(u.coupling) * std::sqrt(static_cast<double>(n - 1));
    case UtilityFamily::WeightedAbsProduct:
    case UtilityFamily::PureProduct: {
      // Best-effort cross-slope bound away from kinks: for each opponent j the
      // mixed slope is at most w * prod_{k not in {i,j}} max|s_k|.
      const double w = (u.family == UtilityFamily::WeightedAbsProduct) ? u.weight : 1.0;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (static_cast<int>(j) == agent) continue;
        double p = w;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == j || static_cast<int>(k) == agent) continue;
          p *= game.boxes[k].max_abs();
        }
        acc += p * p;
      }
      return 0.5 * std::sqrt(acc);
    }
    case UtilityFamily::UserSupplied:
      require_config(u.user_amicability.has_value(),
                     "user utility: amicability constant must be provided");
      return *u.user_amicability;
  }
  throw InvariantError("default_amicability: unreachable");
}

double best_response_residual_agent(const std::vector<Box>& boxes, const ObjectiveFn& value,
                                    const Profile& s, int agent, int grid_points) {
  require(grid_points >= 2, "best_response_residual: need at least 2 grid points");
  const Box& own = boxes[static_cast<std::size_t>(agent)];
  require(own.dim() <= 2, "best_response_residual: own dimension above 2 is not supported");
  const double base = value(agent, s);
  Profile cand = s;
  double best = base;
  if (own.dim() == 1) {
    for (double x : linspace(own.lower[0], own.upper[0], grid_points)) {
      cand.blocks[static_cast<std::size_t>(agent)][0] = x;
      best = std::max(best, value(agent, cand));
    }
  } else {
    const Vec xs = linspace(own.lower[0], own.upper[0], grid_points);
    const Vec ys = linspace(own.lower[1], own.upper[1], grid_points);
    for (double x : xs)
      for (double y : ys) {
        cand.blocks[static_cast<std::size_t>(agent)][0] = x;
        cand.blocks[static_cast<std::size_t>(agent)][1] = y;
        best = std::max(best, value(agent, cand));
      }
  }
  return std::max(0.0, best - base);
}

double best_response_residual(const std::vector<Box>& boxes, const ObjectiveFn& value,
                              const Profile& s, int grid_points) {
  double worst = 0.0;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    worst = std::max(worst, best_response_residual_agent(boxes, value, s,
                                                         static_cast<int>(i), grid_points));
  return worst;
}

double best_response_residual_game(const Game& game, const Profile& s, const Vec& xi,
                                   int grid_points) {
  return best_response_residual(
      game.boxes,
      [&](int agent, const Profile& p) { return utility_eval(game, agent, p, xi); }, s,
      grid_points);
}

}  // namespace drone
