// Dynamic average consensus over a directed, weight-balanced, strongly
// connected graph. Each tracked scalar runs a two-state estimator per node
// (integral state v, proportional state z; the output is x = z + u) whose
// fixed point under constant inputs is the network-wide input average. The
// integral states sum to zero for all time, which pins the output average.
#pragma once

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "drone/common.hpp"

namespace drone {

struct Digraph {
  int nodes = 0;
  // arcs[i] lists (j, weight): node i reads node j's output with this weight.
  std::vector<std::vector<std::pair<int, double>>> in_arcs;
  std::vector<std::vector<std::pair<int, double>>> out_arcs;  // mirror: who reads i

  // Arc list entries are (from, to, weight): `to` reads `from`.
  static Digraph from_arcs(int nodes, const std::vector<std::tuple<int, int, double>>& arcs);
  // Text format: one arc per line, "from to weight" with 1-indexed nodes;
  // '#' starts a comment.
  static Digraph load(const std::string& path);
  static Digraph cycle(int nodes, double weight = 1.0);
  static Digraph complete(int nodes, double weight = 1.0);

  std::vector<int> in_neighbors(int i) const;
  bool strongly_connected() const;
  double weight_balance_gap() const;  // max_i |in-weight(i) - out-weight(i)|
  // Throws ConfigError unless strongly connected and weight balanced (1e-12).
  void validate() const;
};

struct ConsensusGains {
  double b1 = 0.5;
  double b2 = 0.5;
  double b3 = 1.0;
};

// Graph + gains bundle. Construction verifies the per-scalar linear update is
// a contraction on the subspace complementary to the conserved mode: exactly
// one eigenvalue at 1 (the integral-sum invariant, never excited when the
// integral states start at zero), all others strictly inside the unit circle.
struct ConsensusSystem {
  Digraph graph;
  ConsensusGains gains;

  static ConsensusSystem make(Digraph graph, ConsensusGains gains = {});
  // Largest eigenvalue modulus excluding the single conserved mode.
  double contraction_modulus() const;
};

// Estimator state for one tracked scalar: one (v, z) pair per node.
struct ConsensusField {
  Vec v;  // integral states (start at zero; their sum is conserved)
  Vec z;  // proportional states

  static ConsensusField start(const Vec& z0);
  Vec output(const Vec& u) const;  // x = z + u
};

// One synchronous estimator update under the current inputs.
void consensus_substep(ConsensusField& field, const Vec& u, const ConsensusSystem& system);

// max_i |x_i - mean(u)|.
double tracking_error(const ConsensusField& field, const Vec& u);

// Input a node injects for a quantity it owns so that the network average
// equals the quantity itself: nodes * value (non-owners inject zero).
double scaled_input_for_owner(int nodes, double value);

}  // namespace drone
