#include <cmath>

#include "doctest.h"
#include "drone/common.hpp"
#include "drone/dro.hpp"

using namespace drone;

namespace {

// One scalar agent with purely linear noise exposure: U = s * xi.
Game linear_noise_game(double lower = -2.0, double upper = 2.0) {
  Game g;
  g.noise_dim = 1;
  g.boxes.push_back(Box::make({lower}, {upper}));
  UtilitySpec u;
  u.family = UtilityFamily::AffineNoiseQuadratic;
  u.agent = 0;
  u.quad = {0.0};
  u.target = {0.0};
  u.noise_coeff = {1.0};
  u.coupling = 0.0;
  g.utilities.push_back(u);
  g.validate();
  return g;
}

Profile scalar_profile(const Vec& values) {
  Profile p;
  for (double v : values) p.blocks.push_back({v});
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("dro");

TEST_CASE("l1-ball projection matches the soft-threshold closed form") {
  CHECK(project_l1_ball({3.0, -1.0}, 2.0) == Vec{2.0, 0.0});
  CHECK(project_l1_ball({0.5, -0.25}, 2.0) == Vec{0.5, -0.25});  // already inside
  CHECK(norm1(project_l1_ball({5.0, 5.0, 5.0}, 1.0)) == doctest::Approx(1.0));
  // Projection never increases any coordinate magnitude.
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Vec d(4);
    for (double& x : d) x = uniform(rng, -3.0, 3.0);
    const double radius = uniform(rng, 0.1, 2.0);
    const Vec p = project_l1_ball(d, radius);
    CHECK(norm1(p) <= radius + 1e-9);
    for (std::size_t l = 0; l < d.size(); ++l) {
      CHECK(std::fabs(p[l]) <= std::fabs(d[l]) + 1e-12);
      CHECK(p[l] * d[l] >= -1e-12);  // no sign flips
    }
  }
}

TEST_CASE("scenario projection returns feasible points and fixes feasible input") {
  const Box support = Box::make({0.0}, {1.0});
  const std::vector<Vec> rows{{0.25}, {0.75}};
  // Already feasible: unchanged.
  const std::vector<Vec> inside{{0.3}, {0.7}};
  const std::vector<Vec> fixed = project_scenarios(inside, rows, 1.0, support);
  CHECK(fixed[0][0] == doctest::Approx(0.3));
  CHECK(fixed[1][0] == doctest::Approx(0.7));
  // Infeasible input lands on a feasible point.
  const std::vector<Vec> outside{{5.0}, {-4.0}};
  const std::vector<Vec> proj = project_scenarios(outside, rows, 0.5, support);
  double budget = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(support.contains(proj[k], 1e-9));
    budget += norm1(sub(rows[k], proj[k]));
  }
  CHECK(budget <= 0.5 + 1e-9);
}

TEST_CASE("zero radius short-circuits to the sample average exactly") {
  const Game g = linear_noise_game();
  SampleSet samples;
  samples.rows = {{0.2}, {0.4}, {0.9}};
  const Profile s = scalar_profile({1.5});
  const Box support = Box::make({0.0}, {1.0});
  const ScenarioSolution sol = dro_value(g, 0, s, samples, 0.0, support);
  CHECK(sol.value == sample_average_value(g, 0, s, samples.rows));
  CHECK(sol.budget == 0.0);
  for (std::size_t k = 0; k < samples.rows.size(); ++k)
    CHECK(sol.scenarios[k] == samples.rows[k]);
}

TEST_CASE("single-sample linear utility matches the one-dimensional closed form") {
  const Game g = linear_noise_game();
  SampleSet samples;
  samples.rows = {{1.0}};
  const Box support = Box::make({0.0}, {2.0});
  DroOptions opts;
  opts.tol = 1e-9;
  opts.max_iters = 20000;
  // s = 1: the adversary pushes the sample down by the full budget.
  ScenarioSolution sol = dro_value(g, 0, scalar_profile({1.0}), samples, 0.5, support, opts);
  CHECK(sol.value == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.scenarios[0][0] == doctest::Approx(0.5).epsilon(1e-5));
  // s = -1: the push reverses direction.
  sol = dro_value(g, 0, scalar_profile({-1.0}), samples, 0.5, support, opts);
  CHECK(sol.value == doctest::Approx(-1.5).epsilon(1e-6));
  CHECK(sol.scenarios[0][0] == doctest::Approx(1.5).epsilon(1e-5));
  // Budget larger than the support: the scenario saturates at the box face.
  sol = dro_value(g, 0, scalar_profile({1.0}), samples, 10.0, support, opts);
  CHECK(sol.value == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("worst case never exceeds the sample average and decreases with radius") {
  const Game g = linear_noise_game();
  SampleSet samples;
  samples.rows = {{0.3}, {0.8}};
  const Box support = Box::make({0.0}, {1.0});
  const Profile s = scalar_profile({1.0});
  const double avg = sample_average_value(g, 0, s, samples.rows);
  double prev = avg + 1e-12;
  for (double eps : {0.05, 0.1, 0.2, 0.4}) {
    const ScenarioSolution sol = dro_value(g, 0, s, samples, eps, support);
    CHECK(sol.value <= prev + 1e-9);
    CHECK(sol.budget <= 2.0 * eps + 1e-6);
    prev = sol.value;
  }
}

TEST_CASE("quadratic scenario objective lands on the interior optimum") {
  // U(y) = (y - 2)^2 over y in [0, 1], one sample at 0.5, budget 0.3: the
  // minimizer moves toward 2 and stops at the budget: y = 0.8.
  const std::vector<Vec> rows{{0.5}};
  const Box support = Box::make({0.0}, {1.0});
  const ScenarioEval eval = [](std::size_t, const Vec& y) {
    return (y[0] - 2.0) * (y[0] - 2.0);
  };
  const ScenarioGrad grad = [](std::size_t, const Vec& y) {
    return Vec{2.0 * (y[0] - 2.0)};
  };
  DroOptions opts;
  opts.tol = 1e-10;
  opts.max_iters = 20000;
  const ScenarioSolution sol = worst_case_scenarios(eval, grad, rows, 0.3, support, opts);
  CHECK(sol.scenarios[0][0] == doctest::Approx(0.8).epsilon(1e-4));
  CHECK(sol.value == doctest::Approx(1.44).epsilon(1e-4));
}

TEST_CASE("individual mode only moves the owned slice") {
  // Two agents; agent 0 owns coordinate 0, agent 1 owns coordinate 1.
  Game g;
  g.noise_dim = 2;
  for (int i = 0; i < 2; ++i) {
    g.boxes.push_back(Box::make({-2.0}, {2.0}));
    UtilitySpec u;
    u.family = UtilityFamily::AffineNoiseQuadratic;
    u.agent = i;
    u.quad = {0.0};
    u.target = {0.0};
    u.noise_coeff = (i == 0) ? Vec{1.0, 0.0} : Vec{0.0, 1.0};
    g.utilities.push_back(u);
  }
  g.validate();
  SampleSet samples;
  samples.rows = {{0.5, 0.5}, {0.7, 0.9}};
  samples.slices = {{0, 1}, {1, 2}};
  const Box slice0 = Box::make({0.0}, {1.0});
  const Profile s = scalar_profile({1.0, 1.0});
  const ScenarioSolution sol = individual_dro_value(g, 0, s, samples, 0.2, slice0);
  CHECK(sol.scenarios.size() == 2);
  // Slice dimension only.
  CHECK(sol.scenarios[0].size() == 1);
  // Worst case matches the linear closed form on the slice: total budget 0.4
  // pushes the cheaper structure; value = mean(xi0) - 0.4/2.
  CHECK(sol.value == doctest::Approx(0.6 - 0.2).epsilon(1e-4));
}

TEST_CASE("mean worst-case noise splices the solved slice into the sample mean") {
  Game g = linear_noise_game();
  SampleSet samples;
  samples.rows = {{0.2}, {0.6}};
  const Box support = Box::make({0.0}, {1.0});
  const ScenarioSolution sol =
      dro_value(g, 0, scalar_profile({1.0}), samples, 0.1, support);
  const Vec mean = mean_worst_case_noise(g, 0, samples, sol);
  CHECK(mean.size() == 1);
  CHECK(mean[0] == doctest::Approx(sol.mean_scenario()[0]));
}

TEST_CASE("dro supergradient matches finite differences at smooth points") {
  const Game g = linear_noise_game();
  SampleSet samples;
  samples.rows = {{0.25}, {0.75}};
  const Box support = Box::make({0.0}, {1.0});
  DroOptions opts;
  opts.tol = 1e-9;
  opts.max_iters = 20000;
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const double s0 = uniform(rng, 0.5, 1.5);  // stay away from s = 0 kink
    const Profile s = scalar_profile({s0});
    const ScenarioSolution sol = dro_value(g, 0, s, samples, 0.15, support, opts);
    const GradientInterval gi = dro_supergradient(g, 0, s, samples, sol);
    const double h = 1e-5;
    const double up =
        dro_value(g, 0, scalar_profile({s0 + h}), samples, 0.15, support, opts).value;
    const double dn =
        dro_value(g, 0, scalar_profile({s0 - h}), samples, 0.15, support, opts).value;
    const double fd = (up - dn) / (2.0 * h);
    CHECK(gi.singleton(1e-9));
    CHECK(gi.lo[0] == doctest::Approx(fd).epsilon(1e-3));
  }
}

TEST_CASE("robust value satisfies the supergradient inequality in the strategy") {
  const Game g = linear_noise_game();
  SampleSet samples;
  samples.rows = {{0.2}, {0.9}};
  const Box support = Box::make({0.0}, {1.0});
  DroOptions opts;
  opts.tol = 1e-9;
  opts.max_iters = 20000;
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const double sa = uniform(rng, -2.0, 2.0);
    const double sb = uniform(rng, -2.0, 2.0);
    const ScenarioSolution at_a =
        dro_value(g, 0, scalar_profile({sa}), samples, 0.2, support, opts);
    const ScenarioSolution at_b =
        dro_value(g, 0, scalar_profile({sb}), samples, 0.2, support, opts);
    const GradientInterval gi =
        dro_supergradient(g, 0, scalar_profile({sa}), samples, at_a);
    // Concavity of the robust value: value(b) <= value(a) + g (b - a).
    CHECK(at_b.value <= at_a.value + gi.hi[0] * (sb - sa) + 1e-6);
  }
}

TEST_CASE("min-norm supergradient follows the normal-cone closed form") {
  const Box box = Box::make({0.0}, {2.0});
  // Interior point, interval straddling zero: zero is the min-norm element.
  GradientInterval straddle{{-3.0}, {1.0}};
  CHECK(min_norm_supergradient(straddle, {1.0}, box) == Vec{0.0});
  // Upper face with an outward gradient: the normal cone absorbs it and the
  // direction is reported unchanged.
  GradientInterval up{{5.0}, {5.0}};
  CHECK(min_norm_supergradient(up, {2.0}, box) == Vec{5.0});
  // Upper face with an inward gradient: nothing absorbs it.
  GradientInterval down{{-4.0}, {-4.0}};
  CHECK(min_norm_supergradient(down, {2.0}, box) == Vec{-4.0});
  // Lower face with an outward (negative) gradient.
  CHECK(min_norm_supergradient(down, {0.0}, box) == Vec{-4.0});
  // Interior, strictly positive interval: the smallest element wins.
  GradientInterval pos{{2.0}, {6.0}};
  CHECK(min_norm_supergradient(pos, {1.0}, box) == Vec{2.0});
}

TEST_SUITE_END();
