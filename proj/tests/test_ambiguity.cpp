#include <cmath>

#include "doctest.h"
#include "drone/ambiguity.hpp"
#include "drone/common.hpp"

using namespace drone;

namespace {

DiscreteDistribution point_mass(const Vec& atom) {
  DiscreteDistribution d;
  d.atoms = {atom};
  d.weights = {1.0};
  return d;
}

}  // namespace

TEST_SUITE_BEGIN("ambiguity");

TEST_CASE("ambiguity spec validates its ranges") {
  AmbiguitySpec ok;
  CHECK_NOTHROW(ok.validate());
  AmbiguitySpec bad = ok;
  bad.theta = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ok;
  bad.theta = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ok;
  bad.c1 = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ok;
  bad.c2 = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ok;
  bad.a = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("radius formula hits hand-computed values on both branches") {
  AmbiguitySpec spec;
  spec.c1 = std::exp(1.0);
  spec.c2 = 1.0;
  spec.a = 2.0;
  spec.theta = std::exp(-3.0);
  // log(c1/theta) = 4; N = 4 sits exactly at the branch threshold, so the
  // main branch applies: (4 / 4)^(1/2) = 1.
  CHECK(wasserstein_radius(4, 2, spec) == doctest::Approx(1.0));
  // N = 2 < 4 falls to the small-sample branch: (4 / 2)^(1/2) = sqrt(2).
  CHECK(wasserstein_radius(2, 2, spec) == doctest::Approx(std::sqrt(2.0)));

  AmbiguitySpec large;
  large.c1 = 2.0;
  large.c2 = 1.0;
  large.theta = 0.5;
  // (log(4)/100)^(1/2).
  CHECK(wasserstein_radius(100, 2, large) == doctest::Approx(0.117741).epsilon(1e-5));
}

TEST_CASE("radius shrinks with more samples and the dimension exponent bites") {
  AmbiguitySpec spec;
  spec.theta = 0.05;
  double prev = 1e9;
  for (std::size_t n : {8u, 16u, 32u, 64u, 128u}) {
    const double r = wasserstein_radius(n, 2, spec);
    CHECK(r < prev);
    prev = r;
  }
  // Same data, higher dimension => slower rate => larger radius (values < 1).
  CHECK(wasserstein_radius(1000, 4, spec) > wasserstein_radius(1000, 2, spec));
  // Dimensions 1 and 2 share the max(m, 2) exponent.
  CHECK(wasserstein_radius(50, 1, spec) == doctest::Approx(wasserstein_radius(50, 2, spec)));
}

TEST_CASE("radius inflation applies the (1 + C) factor") {
  CHECK(inflate_radius(0.1178, 2.5) == doctest::Approx(0.41230));
  CHECK(inflate_radius(0.3, 0.0) == doctest::Approx(0.3));
  CHECK_THROWS_AS(inflate_radius(-0.1, 0.0), ConfigError);
  CHECK_THROWS_AS(inflate_radius(0.1, -0.5), ConfigError);
}

TEST_CASE("equilibrium-quality bound scales with the worst radius-Lipschitz pair") {
  CHECK(eta_bound({0.1, 0.2}, {1.0, 1.0}, 0.0) == doctest::Approx(0.4));
  CHECK(eta_bound({0.1, 0.2}, {3.0, 1.0}, 0.0) == doctest::Approx(0.6));
  CHECK(eta_bound({0.5}, {2.0}, 1.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(eta_bound({0.1, 0.2}, {1.0}, 0.0), ConfigError);
}

TEST_CASE("discrete distributions validate weights and expose the mean") {
  DiscreteDistribution d;
  d.atoms = {{0.0, 0.0}, {1.0, 2.0}};
  d.weights = {0.25, 0.75};
  CHECK_NOTHROW(d.validate());
  CHECK(d.mean() == Vec{0.75, 1.5});
  d.weights = {0.5, 0.6};
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d.weights = {1.5, -0.5};
  CHECK_THROWS_AS(d.validate(), ConfigError);
  const DiscreteDistribution u = DiscreteDistribution::uniform({{0.0}, {2.0}});
  CHECK(u.weights == Vec{0.5, 0.5});
}

TEST_CASE("wasserstein distance matches hand-solved transport problems") {
  // Point mass to point mass: the ground distance itself.
  CHECK(discrete_wasserstein(point_mass({0.0, 0.0}), point_mass({1.0, 2.0})) ==
        doctest::Approx(3.0));
  CHECK(discrete_wasserstein(point_mass({0.0, 0.0}), point_mass({1.0, 2.0}),
                             GroundMetric::Euclidean) == doctest::Approx(std::sqrt(5.0)));
  // Split mass: half from 0 and half from 2 both travel distance 1 to reach 1.
  const DiscreteDistribution split = DiscreteDistribution::uniform({{0.0}, {2.0}});
  CHECK(discrete_wasserstein(split, point_mass({1.0})) == doctest::Approx(1.0));
  // Matching supports with equal weights: zero distance.
  CHECK(discrete_wasserstein(split, split) == doctest::Approx(0.0));
}

TEST_CASE("wasserstein distance behaves like a metric on random instances") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto draw = [&](std::size_t atoms) {
      DiscreteDistribution d;
      Vec w(atoms);
      double total = 0.0;
      for (std::size_t k = 0; k < atoms; ++k) {
        d.atoms.push_back({uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)});
        w[k] = uniform(rng, 0.1, 1.0);
        total += w[k];
      }
      for (double& x : w) x /= total;
      d.weights = w;
      return d;
    };
    const DiscreteDistribution p = draw(3), q = draw(4), r = draw(2);
    const double pq = discrete_wasserstein(p, q);
    const double qp = discrete_wasserstein(q, p);
    const double pr = discrete_wasserstein(p, r);
    const double rq = discrete_wasserstein(r, q);
    CHECK(pq >= 0.0);
    CHECK(pq == doctest::Approx(qp));                    // symmetry
    CHECK(pq <= pr + rq + 1e-9);                         // triangle inequality
    CHECK(discrete_wasserstein(p, p) == doctest::Approx(0.0));
  }
}

TEST_CASE("wasserstein distance is lower-bounded by the mean gap in 1-D") {
  // For scalar distributions W1 >= |mean difference| (Jensen); equality holds
  // when all mass moves the same direction.
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    DiscreteDistribution p = DiscreteDistribution::uniform(
        {{uniform(rng, 0.0, 1.0)}, {uniform(rng, 0.0, 1.0)}});
    DiscreteDistribution q = DiscreteDistribution::uniform(
        {{uniform(rng, 2.0, 3.0)}, {uniform(rng, 2.0, 3.0)}});
    const double w = discrete_wasserstein(p, q);
    CHECK(w >= std::fabs(p.mean()[0] - q.mean()[0]) - 1e-9);
    CHECK(w == doctest::Approx(q.mean()[0] - p.mean()[0]));
  }
}

TEST_CASE("sample sets slice rows per agent") {
  SampleSet s;
  s.rows = {{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}};
  s.slices = {{0, 1}, {1, 3}};
  CHECK_NOTHROW(s.validate(2));
  CHECK(s.count() == 2);
  CHECK(s.dim() == 3);
  CHECK(s.dim_for_agent(0) == 1);
  CHECK(s.dim_for_agent(1) == 2);
  CHECK(s.rows_for_agent(0) == std::vector<Vec>{{1.0}, {4.0}});
  CHECK(s.rows_for_agent(1) == std::vector<Vec>{{2.0, 3.0}, {5.0, 6.0}});
  // Slices must partition the coordinate range.
  SampleSet bad = s;
  bad.slices = {{0, 1}, {2, 3}};
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
}

TEST_CASE("empirical center carries uniform weights over the observed rows") {
  SampleSet s;
  s.rows = {{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}};
  const DiscreteDistribution full = empirical_center(s);
  CHECK(full.atoms.size() == 3);
  CHECK(full.weights == Vec{1.0 / 3, 1.0 / 3, 1.0 / 3});
  s.slices = {{0, 1}, {1, 2}};
  const DiscreteDistribution own = empirical_center(s, 1);
  CHECK(own.atoms == std::vector<Vec>{{2.0}, {4.0}, {6.0}});
}

TEST_SUITE_END();
