#include <cmath>

#include "doctest.h"
#include "drone/common.hpp"
#include "drone/dynamics.hpp"
#include "drone/game.hpp"

using namespace drone;

namespace {

std::vector<Box> scalar_boxes(std::size_t n, double lo, double hi) {
  std::vector<Box> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Box::make({lo}, {hi}));
  return out;
}

Profile scalar_profile(const Vec& values) {
  Profile p;
  for (double v : values) p.blocks.push_back({v});
  return p;
}

bool mentions(const std::vector<std::string>& lines, const std::string& needle) {
  for (const auto& s : lines)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_SUITE_BEGIN("dynamics");

TEST_CASE("make_params broadcasts scalars and defaults locality to the joint diameter") {
  const auto boxes = scalar_boxes(3, 0.0, 2.0);
  const AlgoParams p = make_params(3, 0.1, 0.5, 3.0, 2.0, {0.5}, boxes);
  CHECK(p.agents() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(p.alpha[i] == 0.1);
    CHECK(p.mu[i] == 0.5);
    CHECK(p.lambda[i] == 3.0);
    CHECK(p.kappa[i] == 2.0);
    CHECK(p.amicability[i] == 0.5);
    CHECK(p.locality[i] == doctest::Approx(2.0 * std::sqrt(3.0)));
  }
  CHECK(p.alpha_min() == 0.1);
  CHECK(p.alpha_max() == 0.1);
  CHECK(p.mu_max() == 0.5);
  CHECK_THROWS_AS(make_params(3, 0.1, 0.5, 3.0, 2.0, {0.5, 0.5}, boxes), ConfigError);
}

TEST_CASE("validate_params pins the admissible inertial-scaling interval") {
  const auto boxes = scalar_boxes(1, 0.0, 2.0);
  // With coupling 2, scaling 0.5, slack 2 the open interval is (0.5, 1).
  AlgoParams p = make_params(1, 0.25, 0.5, 1.5, 2.0, {2.0}, boxes);
  ValidityReport r = validate_params(p, boxes);
  CHECK_FALSE(r.ok);
  CHECK(mentions(r.violations, "inertial scaling 1.5 outside (0.5, 1)"));
  // Inside the interval: valid.
  p.lambda[0] = 0.75;
  r = validate_params(p, boxes);
  CHECK(r.ok);
  CHECK(r.violations.empty());
}

TEST_CASE("validate_params flags blending steps beyond the half cap") {
  const auto boxes = scalar_boxes(1, 0.0, 2.0);
  AlgoParams p = make_params(1, 0.6, 0.5, 0.75, 2.0, {2.0}, boxes);
  const ValidityReport r = validate_params(p, boxes);
  CHECK_FALSE(r.ok);
  CHECK(mentions(r.violations, "blending step 0.6 outside (0, 0.5]"));
}

TEST_CASE("validate_params with zero coupling only bounds the scaling from below") {
  const auto boxes = scalar_boxes(1, 0.0, 2.0);
  // kappa 2, mu 0.5: lambda must exceed 1; no upper bound.
  AlgoParams p = make_params(1, 0.25, 0.5, 0.9, 2.0, {0.0}, boxes);
  ValidityReport r = validate_params(p, boxes);
  CHECK_FALSE(r.ok);
  CHECK(mentions(r.violations, "outside (1, inf)"));
  p.lambda[0] = 50.0;
  CHECK(validate_params(p, boxes).ok);
}

TEST_CASE("validate_params rejects slack factors at or below one") {
  const auto boxes = scalar_boxes(1, 0.0, 2.0);
  AlgoParams p = make_params(1, 0.25, 0.5, 2.0, 1.0, {0.0}, boxes);
  const ValidityReport r = validate_params(p, boxes);
  CHECK_FALSE(r.ok);
  CHECK(mentions(r.violations, "slack factor must exceed 1"));
}

TEST_CASE("support vertex follows signs and resolves zeros to the lower bound") {
  const Box box = Box::make({0.0, 0.0, 0.0}, {2.0, 2.0, 2.0});
  CHECK(support_argmax({1.0, -2.0, 0.0}, box) == Vec{2.0, 0.0, 0.0});
  const Box asym = Box::make({-1.0}, {3.0});
  CHECK(support_argmax({0.5}, asym) == Vec{3.0});
  CHECK(support_argmax({-0.5}, asym) == Vec{-1.0});
  CHECK(support_argmax({0.0}, asym) == Vec{-1.0});
}

TEST_CASE("composite direction blends the scaled field with the inertial pull") {
  const Vec phi = compose_phi(0.5, {2.0}, 1.0, {0.5}, {0.25});
  CHECK(phi == Vec{0.75});
  // Zero displacement: pure scaled field.
  CHECK(compose_phi(0.25, {4.0, -4.0}, 2.0, {1.0, 1.0}, {1.0, 1.0}) == Vec{1.0, -1.0});
  CHECK_THROWS_AS(compose_phi(0.5, {1.0}, 0.0, {0.0}, {0.0}), InvariantError);
}

TEST_CASE("first step sees zero displacement and blends toward the chosen vertex") {
  const auto boxes = scalar_boxes(1, 0.0, 2.0);
  const AlgoParams p = make_params(1, 0.25, 1.0, 2.0, 2.0, {0.0}, boxes);
  const VField field = [](const Profile&) { return std::vector<Vec>{{1.0}}; };
  DynamicsState st = init_dynamics(scalar_profile({1.0}));
  CHECK(st.current.blocks == st.previous.blocks);
  CHECK(st.step == 0);
  StepInfo info;
  st = dynamics_step(st, field, p, boxes, &info);
  // phi = 1 * 1 - 0 = 1 > 0 -> vertex 2 -> s = 0.75 * 1 + 0.25 * 2.
  CHECK(info.phi[0] == Vec{1.0});
  CHECK(info.vertex[0] == Vec{2.0});
  CHECK(st.current.blocks[0][0] == 1.25);
  CHECK(st.previous.blocks[0][0] == 1.0);
  CHECK(st.step == 1);
}

TEST_CASE("a selection-consistent corner is an exact fixed point") {
  const auto boxes = scalar_boxes(2, -2.0, 2.0);
  // 0.25 and 0.75 are exact in binary, so the blend cannot drift by an ulp.
  const AlgoParams p = make_params(2, 0.25, 0.5, 3.0, 2.0, {0.5}, boxes);
  // The field keeps pointing at the corner (-2, 2).
  const VField field = [](const Profile&) { return std::vector<Vec>{{-1.0}, {1.0}}; };
  DynamicsState st = init_dynamics(scalar_profile({-2.0, 2.0}));
  for (int t = 0; t < 5; ++t) {
    st = dynamics_step(st, field, p, boxes);
    CHECK(st.current.blocks[0][0] == -2.0);
    CHECK(st.current.blocks[1][0] == 2.0);
  }
}

TEST_CASE("supported gap is the box maximum minus the current alignment") {
  const auto boxes = scalar_boxes(1, 0.0, 2.0);
  CHECK(lyapunov_value(scalar_profile({0.0}), {{1.0}}, boxes) == 2.0);
  CHECK(lyapunov_value(scalar_profile({2.0}), {{1.0}}, boxes) == 0.0);
  // The gap is nonnegative for any in-box profile and any direction.
  Rng rng(21);
  const auto boxes2 = scalar_boxes(3, -1.5, 2.5);
  for (int trial = 0; trial < 50; ++trial) {
    Profile s;
    std::vector<Vec> phi;
    for (const Box& b : boxes2) {
      s.blocks.push_back(b.sample(rng));
      phi.push_back({uniform(rng, -3.0, 3.0)});
    }
    CHECK(lyapunov_value(s, phi, boxes2) >= -1e-12);
  }
}

TEST_CASE("decrement shaping function") {
  CHECK(rho1(0.5, 0.1) == doctest::Approx(0.35));
  CHECK(rho1(0.0, 0.0) == 0.0);
  CHECK(rho1(1.0, 0.25) == doctest::Approx(0.25));
}

TEST_CASE("bound constants reproduce the hand-computed single-agent case") {
  const auto boxes = scalar_boxes(1, 0.0, 2.0);  // diameter 2
  AlgoParams p = make_params(1, 0.25, 0.5, 0.9, 2.0, {1.0}, boxes);
  const BoundConstants b = bound_constants(p, {1.0}, boxes);
  CHECK(b.reach[0] == doctest::Approx(6.0));      // 2*1 + 2*2*1
  CHECK(b.unit_cost[0] == doctest::Approx(12.0)); // max(4/0.9, 6*2)
  CHECK(b.total_cost == doctest::Approx(12.0));
  CHECK(b.rho1_value == doctest::Approx(rho1(0.25, 0.5)));
  CHECK(b.ceiling == doctest::Approx(b.total_cost * b.rho1_value / (0.5 * 0.25)));
  CHECK(b.ceiling_perturbed >= b.ceiling);
  CHECK(b.joint_reach == doctest::Approx(2.0));  // max |coordinate| over [0,2]
  CHECK(b.phi_bound[0] == doctest::Approx(0.5 * 1.0 + 2.0 / 0.9));
  // A supplied per-agent displacement bound replaces the diameter.
  const BoundConstants tight = bound_constants(p, {1.0}, boxes, 0.5, {0.1});
  CHECK(tight.unit_cost[0] == doctest::Approx(4.0 / 0.9));
  CHECK_THROWS_AS(bound_constants(p, {1.0}, boxes, 1.2), InvariantError);
}

TEST_CASE("sampled coupling estimate stays below the closed-form constant") {
  Game g;
  g.noise_dim = 0;
  for (int i = 0; i < 2; ++i) {
    g.boxes.push_back(Box::make({-1.0}, {1.0}));
    UtilitySpec u;
    u.family = UtilityFamily::Quadratic;
    u.agent = i;
    u.quad = {1.0};
    u.target = {0.0};
    g.utilities.push_back(u);
  }
  g.validate();
  Profile base = scalar_profile({0.2, -0.3});
  const double est = estimate_amicability(g, 0, base, 0.5, 200, 7);
  CHECK(est >= 0.0);
  CHECK(est <= default_amicability(g, 0) + 1e-9);
}

TEST_SUITE_END();
