#include "drone/consensus.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace drone {

Digraph Digraph::from_arcs(int nodes, const std::vector<std::tuple<int, int, double>>& arcs) {
  require_config(nodes > 0, "graph: need at least one node");
  Digraph g;
  g.nodes = nodes;
  g.in_arcs.resize(static_cast<std::size_t>(nodes));
  g.out_arcs.resize(static_cast<std::size_t>(nodes));
  for (const auto& [from, to, w] : arcs) {
    require_config(from >= 0 && from < nodes && to >= 0 && to < nodes,
                   "graph: arc endpoint out of range");
    require_config(from != to, "graph: self-loops are not allowed");
    require_config(w > 0.0, "graph: arc weights must be positive");
    g.in_arcs[static_cast<std::size_t>(to)].emplace_back(from, w);
    g.out_arcs[static_cast<std::size_t>(from)].emplace_back(to, w);
  }
  return g;
}

Digraph Digraph::load(const std::string& path) {
  std::ifstream in(path);
  require_config(in.good(), "graph: cannot open " + path);
  int max_node = 0;
  std::vector<std::tuple<int, int, double>> arcs;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    int from = 0, to = 0;
    double w = 0.0;
    if (!(ls >> from >> to)) continue;
    if (!(ls >> w)) w = 1.0;
    require_config(from >= 1 && to >= 1, "graph: nodes are 1-indexed");
    arcs.emplace_back(from - 1, to - 1, w);
    max_node = std::max(max_node, std::max(from, to));
  }
  require_config(max_node > 0, "graph: no arcs in " + path);
  return from_arcs(max_node, arcs);
}

Digraph Digraph::cycle(int nodes, double weight) {
  std::vector<std::tuple<int, int, double>> arcs;
  for (int i = 0; i < nodes; ++i) arcs.emplace_back(i, (i + 1) % nodes, weight);
  return from_arcs(nodes, arcs);
}

Digraph Digraph::complete(int nodes, double weight) {
  std::vector<std::tuple<int, int, double>> arcs;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j)
      if (i != j) arcs.emplace_back(i, j, weight);
  return from_arcs(nodes, arcs);
}

std::vector<int> Digraph::in_neighbors(int i) const {
  std::vector<int> out;
  for (const auto& [j, w] : in_arcs[static_cast<std::size_t>(i)]) {
    (void)w;
    out.push_back(j);
  }
  return out;
}

bool Digraph::strongly_connected() const {
  auto reach = [&](const std::vector<std::vector<std::pair<int, double>>>& adj) {
    std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& [w, weight] : adj[static_cast<std::size_t>(u)]) {
        (void)weight;
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return nodes > 0 && reach(out_arcs) && reach(in_arcs);
}

double Digraph::weight_balance_gap() const {
  double gap = 0.0;
  for (int i = 0; i < nodes; ++i) {
    double in_w = 0.0, out_w = 0.0;
    for (const auto& [j, w] : in_arcs[static_cast<std::size_t>(i)]) {
      (void)j;
      in_w += w;
    }
    for (const auto& [j, w] : out_arcs[static_cast<std::size_t>(i)]) {
      (void)j;
      out_w += w;
    }
    gap = std::max(gap, std::fabs(in_w - out_w));
  }
  return gap;
}

void Digraph::validate() const {
  require_config(nodes > 0, "graph: empty");
  require_config(strongly_connected(), "graph: must be strongly connected");
  require_config(weight_balance_gap() <= 1e-12,
                 "graph: must be weight balanced (in-weight == out-weight per node)");
}

namespace {

// Laplacian action: (L x)_i = sum_j a_ij (x_i - x_j).
Vec laplacian_apply(const Digraph& g, const Vec& x) {
  Vec out(static_cast<std::size_t>(g.nodes), 0.0);
  for (int i = 0; i < g.nodes; ++i) {
    double acc = 0.0;
    for (const auto& [j, w] : g.in_arcs[static_cast<std::size_t>(i)])
      acc += w * (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

Eigen::MatrixXd laplacian_matrix(const Digraph& g) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(g.nodes, g.nodes);
  for (int i = 0; i < g.nodes; ++i)
    for (const auto& [j, w] : g.in_arcs[static_cast<std::size_t>(i)]) {
      L(i, i) += w;
      L(i, j) -= w;
    }
  return L;
}

}  // namespace

ConsensusSystem ConsensusSystem::make(Digraph graph, ConsensusGains gains) {
  graph.validate();
  require_config(gains.b1 > 0.0 && gains.b2 > 0.0 && gains.b3 > 0.0,
                 "consensus: gains must be positive");
  ConsensusSystem sys{std::move(graph), gains};
  const double modulus = sys.contraction_modulus();
  require_config(modulus < 1.0 - 1e-9,
                 "consensus: gains do not contract on this graph (modulus " +
                     format_double(modulus) + ")");
  return sys;
}

double ConsensusSystem::contraction_modulus() const {
  const int n = graph.nodes;
  const Eigen::MatrixXd L = laplacian_matrix(graph);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  const double b1 = gains.b1, b2 = gains.b2, b3 = gains.b3;
  M.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  M.topRightCorner(n, n) = b1 * b2 * b3 * L;
  M.bottomLeftCorner(n, n) = -b1 * Eigen::MatrixXd::Identity(n, n);
  M.bottomRightCorner(n, n) = (1.0 - b1 * b2) * Eigen::MatrixXd::Identity(n, n) - b1 * b3 * L;
  const Eigen::VectorXcd eig = M.eigenvalues();
  // Exactly one conserved mode is expected at 1; everything else must
  // contract. Report the largest modulus after removing the single closest
  // eigenvalue to 1.
  int keep = -1;
  double best = 1e300;
  for (int k = 0; k < eig.size(); ++k) {
    const double d = std::abs(eig(k) - std::complex<double>(1.0, 0.0));
    if (d < best) {
      best = d;
      keep = k;
    }
  }
  require_config(best <= 1e-9, "consensus: conserved mode missing from the update spectrum");
  double modulus = 0.0;
  for (int k = 0; k < eig.size(); ++k) {
    if (k == keep) continue;
    modulus = std::max(modulus, std::abs(eig(k)));
  }
  return modulus;
}

ConsensusField ConsensusField::start(const Vec& z0) {
  ConsensusField f;
  f.v.assign(z0.size(), 0.0);
  f.z = z0;
  return f;
}

Vec ConsensusField::output(const Vec& u) const { return add(z, u); }

void consensus_substep(ConsensusField& field, const Vec& u, const ConsensusSystem& system) {
  const Digraph& g = system.graph;
  const std::size_t n = static_cast<std::size_t>(g.nodes);
  require(field.v.size() == n && field.z.size() == n && u.size() == n,
          "consensus_substep: size mismatch");
  const Vec x = field.output(u);
  const Vec disg = laplacian_apply(g, x);
  const double b1 = system.gains.b1, b2 = system.gains.b2, b3 = system.gains.b3;
  Vec v_next(n), z_next(n);
  for (std::size_t i = 0; i < n; ++i) {
    v_next[i] = field.v[i] + b1 * b2 * b3 * disg[i];
    z_next[i] = (1.0 - b1 * b2) * field.z[i] - b1 * field.v[i] - b1 * b3 * disg[i];
  }
  field.v = std::move(v_next);
  field.z = std::move(z_next);
}

double tracking_error(const ConsensusField& field, const Vec& u) {
  const Vec x = field.output(u);
  double mean = 0.0;
  for (double value : u) mean += value;
  mean /= static_cast<double>(u.size());
  double err = 0.0;
  for (double value : x) err = std::max(err, std::fabs(value - mean));
  return err;
}

double scaled_input_for_owner(int nodes, double value) {
  return static_cast<double>(nodes) * value;
}

}  // namespace drone
