#include "drone/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace drone {

void AmbiguitySpec::validate() const {
  require_config(c1 > 0.0, "ambiguity: c1 must be positive");
  require_config(c2 > 0.0, "ambiguity: c2 must be positive");
  require_config(a > 1.0, "ambiguity: tail exponent must exceed 1");
  require_config(theta > 0.0 && theta < 1.0, "ambiguity: confidence level must lie in (0,1)");
}

double wasserstein_radius(std::size_t num_samples, std::size_t dim, const AmbiguitySpec& spec) {
  spec.validate();
  require_config(num_samples > 0, "radius: need at least one sample");
  require_config(dim > 0, "radius: dimension must be positive");
  const double x = std::log(spec.c1 / spec.theta);
  require_config(x > 0.0, "radius: confidence level must be below c1");
  const double n = static_cast<double>(num_samples);
  const double ratio = x / (spec.c2 * n);
  const double threshold = x / spec.c2;
  const double exponent =
      (n >= threshold) ? 1.0 / static_cast<double>(std::max<std::size_t>(dim, 2)) : 1.0 / spec.a;
  return std::pow(ratio, exponent);
}

double inflate_radius(double radius, double estimation_constant) {
  require_config(radius >= 0.0, "inflate: radius must be nonnegative");
  require_config(estimation_constant >= 0.0, "inflate: estimation constant must be nonnegative");
  return (1.0 + estimation_constant) * radius;
}

double eta_bound(const Vec& radii, const Vec& lipschitz, double estimation_constant) {
  require_config(!radii.empty() && radii.size() == lipschitz.size(),
                 "eta_bound: radii and Lipschitz lists must match");
  require_config(estimation_constant >= 0.0, "eta_bound: estimation constant must be nonnegative");
  double worst = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require_config(radii[i] >= 0.0 && lipschitz[i] >= 0.0,
                   "eta_bound: radii and Lipschitz constants must be nonnegative");
    worst = std::max(worst, radii[i] * lipschitz[i]);
  }
  return 2.0 * (1.0 + estimation_constant) * worst;
}

void DiscreteDistribution::validate() const {
  require_config(!atoms.empty(), "distribution: no atoms");
  require_config(atoms.size() == weights.size(), "distribution: atom/weight count mismatch");
  const std::size_t m = atoms[0].size();
  double total = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    require_config(atoms[k].size() == m, "distribution: atom dimension mismatch");
    require_config(weights[k] >= 0.0, "distribution: negative weight");
    total += weights[k];
  }
  require_config(std::fabs(total - 1.0) <= 1e-9, "distribution: weights must sum to one");
}

Vec DiscreteDistribution::mean() const {
  Vec m(dim(), 0.0);
  for (std::size_t k = 0; k < atoms.size(); ++k)
    for (std::size_t l = 0; l < m.size(); ++l) m[l] += weights[k] * atoms[k][l];
  return m;
}

DiscreteDistribution DiscreteDistribution::uniform(std::vector<Vec> atoms) {
  DiscreteDistribution d;
  const double w = 1.0 / static_cast<double>(atoms.size());
  d.weights.assign(atoms.size(), w);
  d.atoms = std::move(atoms);
  d.validate();
  return d;
}

void SampleSet::validate(std::size_t agents) const {
  require_config(!rows.empty(), "samples: empty sample set");
  const std::size_t m = rows[0].size();
  require_config(m > 0, "samples: zero-dimensional rows");
  for (const Vec& r : rows)
    require_config(r.size() == m, "samples: ragged rows");
  if (slices.empty()) return;  // shared mode
  require_config(slices.size() == agents, "samples: one slice per agent required");
  std::size_t pos = 0;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    require_config(slices[i].first == pos, "samples: slices must partition coordinates in order");
    require_config(slices[i].second > slices[i].first, "samples: empty slice");
    pos = slices[i].second;
  }
  require_config(pos == m, "samples: slices must cover all coordinates");
}

std::vector<Vec> SampleSet::rows_for_agent(int agent) const {
  if (slices.empty() || agent < 0) return rows;
  const auto [b, e] = slices[static_cast<std::size_t>(agent)];
  std::vector<Vec> out;
  out.reserve(rows.size());
  for (const Vec& r : rows)
    out.emplace_back(r.begin() + static_cast<long>(b), r.begin() + static_cast<long>(e));
  return out;
}

std::size_t SampleSet::dim_for_agent(int agent) const {
  if (slices.empty() || agent < 0) return dim();
  return slices[static_cast<std::size_t>(agent)].second -
         slices[static_cast<std::size_t>(agent)].first;
}

DiscreteDistribution empirical_center(const SampleSet& samples, int agent) {
  return DiscreteDistribution::uniform(samples.rows_for_agent(agent));
}

namespace {

double ground_cost(const Vec& a, const Vec& b, GroundMetric metric) {
  return metric == GroundMetric::L1 ? norm1(sub(a, b)) : dist2(a, b);
}

// Min-cost flow by successive shortest augmenting paths with potentials.
// Node layout: 0 = source, 1..P = supply atoms, P+1..P+Q = demand atoms,
// P+Q+1 = sink. Real-valued capacities; each augmentation saturates a
// source or sink arc, so at most P+Q augmentations are needed.
struct FlowEdge {
  int to;
  double cap;
  double cost;
  int rev;  // index of reverse edge in graph[to]
};

class FlowGraph {
 public:
  explicit FlowGraph(int nodes) : adj_(static_cast<std::size_t>(nodes)) {}

  void add_edge(int from, int to, double cap, double cost) {
    adj_[static_cast<std::size_t>(from)].push_back(
        {to, cap, cost, static_cast<int>(adj_[static_cast<std::size_t>(to)].size())});
    adj_[static_cast<std::size_t>(to)].push_back(
        {from, 0.0, -cost, static_cast<int>(adj_[static_cast<std::size_t>(from)].size()) - 1});
  }

  // Sends `amount` of flow from s to t at minimum cost; returns total cost.
  double min_cost_flow(int s, int t, double amount) {
    const int n = static_cast<int>(adj_.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> potential(static_cast<std::size_t>(n), 0.0);
    double total_cost = 0.0;
    double remaining = amount;
    const double flow_eps = 1e-14;
    while (remaining > flow_eps) {
      // Dijkstra on reduced costs.
      std::vector<double> dist(static_cast<std::size_t>(n), inf);
      std::vector<int> prev_node(static_cast<std::size_t>(n), -1);
      std::vector<int> prev_edge(static_cast<std::size_t>(n), -1);
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
      dist[static_cast<std::size_t>(s)] = 0.0;
      heap.emplace(0.0, s);
      while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(u)] + 1e-18) continue;
        const auto& edges = adj_[static_cast<std::size_t>(u)];
        for (int idx = 0; idx < static_cast<int>(edges.size()); ++idx) {
          const FlowEdge& e = edges[static_cast<std::size_t>(idx)];
          if (e.cap <= flow_eps) continue;
          // Reduced costs are nonnegative in exact arithmetic; roundoff can
          // leave tiny negative values on residual arcs, and a negative
          // cycle of order 1e-17 would make Dijkstra relax forever. Clamp
          // the search metric at zero (true costs still accumulate below).
          const double reduced =
              std::max(0.0, e.cost + potential[static_cast<std::size_t>(u)] -
                                potential[static_cast<std::size_t>(e.to)]);
          const double nd = d + reduced;
          if (nd < dist[static_cast<std::size_t>(e.to)] - 1e-18) {
            dist[static_cast<std::size_t>(e.to)] = nd;
            prev_node[static_cast<std::size_t>(e.to)] = u;
            prev_edge[static_cast<std::size_t>(e.to)] = idx;
            heap.emplace(nd, e.to);
          }
        }
      }
      require(dist[static_cast<std::size_t>(t)] < inf,
              "transportation: no augmenting path (unbalanced marginals)");
      for (int u = 0; u < n; ++u)
        if (dist[static_cast<std::size_t>(u)] < inf)
          potential[static_cast<std::size_t>(u)] += dist[static_cast<std::size_t>(u)];
      // Bottleneck along the path.
      double push = remaining;
      for (int u = t; u != s;) {
        const int p = prev_node[static_cast<std::size_t>(u)];
        const FlowEdge& e = adj_[static_cast<std::size_t>(p)][static_cast<std::size_t>(
            prev_edge[static_cast<std::size_t>(u)])];
        push = std::min(push, e.cap);
        u = p;
      }
      for (int u = t; u != s;) {
        const int p = prev_node[static_cast<std::size_t>(u)];
        FlowEdge& e = adj_[static_cast<std::size_t>(p)][static_cast<std::size_t>(
            prev_edge[static_cast<std::size_t>(u)])];
        e.cap -= push;
        adj_[static_cast<std::size_t>(u)][static_cast<std::size_t>(e.rev)].cap += push;
        total_cost += push * e.cost;
        u = p;
      }
      remaining -= push;
    }
    return total_cost;
  }

 private:
  std::vector<std::vector<FlowEdge>> adj_;
};

}  // namespace

double discrete_wasserstein(const DiscreteDistribution& p, const DiscreteDistribution& q,
                            GroundMetric metric) {
  p.validate();
  q.validate();
  require_config(p.dim() == q.dim(), "wasserstein: dimension mismatch");
  require_config(p.atoms.size() <= 64 && q.atoms.size() <= 64,
                 "wasserstein: exact solver limited to 64 atoms per side");
  const int np = static_cast<int>(p.atoms.size());
  const int nq = static_cast<int>(q.atoms.size());
  const int source = 0;
  const int sink = np + nq + 1;
  FlowGraph g(np + nq + 2);
  for (int i = 0; i < np; ++i)
    g.add_edge(source, 1 + i, p.weights[static_cast<std::size_t>(i)], 0.0);
  for (int j = 0; j < nq; ++j)
    g.add_edge(1 + np + j, sink, q.weights[static_cast<std::size_t>(j)], 0.0);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < nq; ++j)
      g.add_edge(1 + i, 1 + np + j, std::numeric_limits<double>::infinity(),
                 ground_cost(p.atoms[static_cast<std::size_t>(i)],
                             q.atoms[static_cast<std::size_t>(j)], metric));
  return g.min_cost_flow(source, sink, 1.0);
}

}  // namespace drone
