#include <cmath>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "drone/common.hpp"
#include "drone/consensus.hpp"

using namespace drone;

TEST_SUITE_BEGIN("consensus");

TEST_CASE("graph constructors, connectivity, and balance checks") {
  const Digraph c6 = Digraph::cycle(6);
  CHECK(c6.nodes == 6);
  CHECK(c6.strongly_connected());
  CHECK(c6.weight_balance_gap() == 0.0);
  CHECK_NOTHROW(c6.validate());
  for (int i = 0; i < 6; ++i) {
    const auto nbrs = c6.in_neighbors(i);
    REQUIRE(nbrs.size() == 1);
    CHECK(nbrs[0] == (i + 5) % 6);
  }
  CHECK_NOTHROW(Digraph::complete(3).validate());
  // Single node: trivially connected and balanced; a self-loop is rejected.
  CHECK_NOTHROW(Digraph::from_arcs(1, {}).validate());
  CHECK_THROWS_AS(Digraph::cycle(1), ConfigError);
  // Two disjoint balanced 2-cycles: balanced but not strongly connected.
  const Digraph split = Digraph::from_arcs(
      4, {{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}});
  CHECK(split.weight_balance_gap() == 0.0);
  CHECK_FALSE(split.strongly_connected());
  CHECK_THROWS_AS(split.validate(), ConfigError);
  // Unbalanced weights on a connected graph.
  const Digraph lopsided = Digraph::from_arcs(2, {{0, 1, 2.0}, {1, 0, 1.0}});
  CHECK(lopsided.weight_balance_gap() == doctest::Approx(1.0));
  CHECK_THROWS_AS(lopsided.validate(), ConfigError);
  CHECK_THROWS_AS(Digraph::from_arcs(2, {{0, 1, -1.0}}), ConfigError);
  CHECK_THROWS_AS(Digraph::from_arcs(2, {{0, 2, 1.0}}), ConfigError);
}

TEST_CASE("graph file loader matches the built-in cycle") {
  const char* root = std::getenv("DRONE_ROOT");
  REQUIRE(root != nullptr);
  const Digraph loaded = Digraph::load(std::string(root) + "/data/graphs/cycle6.txt");
  const Digraph built = Digraph::cycle(6);
  REQUIRE(loaded.nodes == built.nodes);
  for (int i = 0; i < 6; ++i) {
    REQUIRE(loaded.in_arcs[static_cast<std::size_t>(i)].size() == 1);
    CHECK(loaded.in_arcs[static_cast<std::size_t>(i)][0] ==
          built.in_arcs[static_cast<std::size_t>(i)][0]);
  }
  CHECK_THROWS_AS(Digraph::load(std::string(root) + "/data/graphs/missing.txt"), ConfigError);
}

TEST_CASE("estimator construction accepts contracting gains and rejects others") {
  const ConsensusSystem sys = ConsensusSystem::make(Digraph::cycle(6));
  const double m = sys.contraction_modulus();
  CHECK(m > 0.0);
  CHECK(m < 1.0);
  // b1*b2 = 2 leaves a reflection mode on the unit circle.
  CHECK_THROWS_AS(ConsensusSystem::make(Digraph::cycle(6), ConsensusGains{2.0, 1.0, 1.0}),
                  ConfigError);
  CHECK_THROWS_AS(ConsensusSystem::make(Digraph::cycle(6), ConsensusGains{0.0, 0.5, 1.0}),
                  ConfigError);
}

TEST_CASE("owner input scaling turns the average into the owned value") {
  CHECK(scaled_input_for_owner(6, 0.5) == 3.0);
  CHECK(scaled_input_for_owner(4, -0.25) == -1.0);
}

TEST_CASE("equal inputs with zero states are an exact fixed point") {
  const ConsensusSystem sys = ConsensusSystem::make(Digraph::cycle(4));
  ConsensusField f = ConsensusField::start(Vec(4, 0.0));
  const Vec u(4, 1.75);
  for (int t = 0; t < 10; ++t) {
    consensus_substep(f, u, sys);
    for (double v : f.v) CHECK(v == 0.0);
    for (double z : f.z) CHECK(z == 0.0);
  }
  CHECK(tracking_error(f, u) == 0.0);
}

TEST_CASE("integral states sum to zero for all time") {
  const ConsensusSystem sys = ConsensusSystem::make(Digraph::cycle(5));
  ConsensusField f = ConsensusField::start(Vec(5, 0.0));
  Rng rng(33);
  Vec u(5);
  for (double& x : u) x = uniform(rng, -2.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    if (t % 40 == 0)  // occasionally move the inputs; the invariant must hold
      for (double& x : u) x = uniform(rng, -2.0, 2.0);
    consensus_substep(f, u, sys);
    double sum = 0.0;
    for (double v : f.v) sum += v;
    worst = std::max(worst, std::fabs(sum));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("constant inputs drive every output to the network average") {
  const ConsensusSystem sys = ConsensusSystem::make(Digraph::cycle(6));
  ConsensusField f = ConsensusField::start(Vec(6, 0.0));
  Vec u(6, 0.0);
  u[2] = scaled_input_for_owner(6, 0.5);  // owner injects 3, average is 0.5
  const Vec x0 = f.output(u);
  CHECK(x0[2] == 3.0);  // before any substep the output is the raw input
  double err_early = 0.0;
  double err = 0.0;
  for (int t = 1; t <= 300; ++t) {
    consensus_substep(f, u, sys);
    err = tracking_error(f, u);
    if (t == 10) err_early = err;
  }
  CHECK(err <= 1e-6);
  CHECK(err < err_early);
  // Every output is now the owned value itself.
  const Vec x = f.output(u);
  for (double xi : x) CHECK(xi == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("tracking error measures the worst output deviation from the mean") {
  ConsensusField f = ConsensusField::start(Vec(2, 0.0));
  CHECK(tracking_error(f, {1.0, 3.0}) == 1.0);
  f.z = {0.5, -0.5};
  CHECK(tracking_error(f, {1.0, 3.0}) == doctest::Approx(0.5));
}

TEST_SUITE_END();
