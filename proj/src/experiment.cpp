#include "drone/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

namespace drone {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    require_config(pos == s.size(), what + ": trailing characters in '" + s + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError(what + ": cannot parse number '" + s + "'");
  }
}

long parse_long(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    require_config(pos == s.size(), what + ": trailing characters in '" + s + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError(what + ": cannot parse integer '" + s + "'");
  }
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(what + ": cannot parse boolean '" + s + "'");
}

Vec parse_list(const std::string& s, const std::string& what) {
  Vec out;
  for (const std::string& tok : split_ws(s)) out.push_back(parse_double(tok, what));
  return out;
}

Vec broadcast(Vec v, std::size_t n, const std::string& what) {
  if (v.size() == n) return v;
  require_config(v.size() == 1, what + ": expected 1 or " + std::to_string(n) + " values");
  return Vec(n, v[0]);
}

// Tracks which keys were consumed so typos surface as errors.
class Reader {
 public:
  explicit Reader(const ConfigMap& map) : map_(map) {}

  bool has(const std::string& key) const { return map_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    auto it = map_.find(key);
    return it == map_.end() ? fallback : it->second;
  }
  std::string require_str(const std::string& key) {
    used_.insert(key);
    auto it = map_.find(key);
    require_config(it != map_.end(), "config: missing required key '" + key + "'");
    return it->second;
  }
  double num(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = map_.find(key);
    return it == map_.end() ? fallback : parse_double(it->second, key);
  }
  long integer(const std::string& key, long fallback) {
    used_.insert(key);
    auto it = map_.find(key);
    return it == map_.end() ? fallback : parse_long(it->second, key);
  }
  bool flag(const std::string& key, bool fallback) {
    used_.insert(key);
    auto it = map_.find(key);
    return it == map_.end() ? fallback : parse_bool(it->second, key);
  }
  Vec list(const std::string& key, Vec fallback = {}) {
    used_.insert(key);
    auto it = map_.find(key);
    return it == map_.end() ? fallback : parse_list(it->second, key);
  }
  void finish() const {
    for (const auto& [key, value] : map_) {
      (void)value;
      require_config(used_.count(key) > 0, "config: unknown key '" + key + "'");
    }
  }

 private:
  const ConfigMap& map_;
  std::set<std::string> used_;
};

}  // namespace

ConfigMap parse_ini_text(const std::string& text, const std::string& origin) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require_config(line.back() == ']',
                     origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      require_config(!section.empty(),
                     origin + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    require_config(eq != std::string::npos,
                   origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require_config(!key.empty(), origin + ":" + std::to_string(lineno) + ": empty key");
    require_config(!section.empty(),
                   origin + ":" + std::to_string(lineno) + ": key outside any [section]");
    map[section + "." + key] = value;
  }
  return map;
}

ConfigMap parse_ini_file(const std::string& path) {
  std::ifstream in(path);
  require_config(in.good(), "config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_ini_text(buf.str(), path);
}

ExperimentConfig build_config(const ConfigMap& map) {
  Reader r(map);
  ExperimentConfig c;
  c.name = r.str("run.name", "experiment");
  c.architecture = r.str("run.architecture", "centralized");
  require_config(c.architecture == "centralized" || c.architecture == "distributed",
                 "run.architecture must be centralized or distributed");
  c.mode = r.str("run.mode", "stochastic-reference");
  require_config(c.mode == "stochastic-reference" || c.mode == "dro-individual" ||
                     c.mode == "dro-shared",
                 "run.mode must be stochastic-reference, dro-individual or dro-shared");
  c.horizon = r.integer("run.horizon", 1000);
  require_config(c.horizon >= 1, "run.horizon must be at least 1");
  c.seed = static_cast<std::uint64_t>(r.integer("run.seed", 1));
  c.burn_in = r.num("run.burn_in", 0.8);
  require_config(c.burn_in >= 0.0 && c.burn_in < 1.0, "run.burn_in must lie in [0,1)");
  c.eta_grid = static_cast<int>(r.integer("run.eta_grid", 201));
  require_config(c.eta_grid >= 2, "run.eta_grid must be at least 2");
  c.eta_cadence = r.integer("run.eta_cadence", 0);
  require_config(c.eta_cadence >= 0, "run.eta_cadence must be nonnegative");
  c.out_dir = r.str("run.out", "out");
  c.margin = r.num("run.margin", 0.5);
  require_config(c.margin > 0.0 && c.margin < 1.0, "run.margin must lie in (0,1)");

  c.family = r.str("game.family", "quadratic");
  c.agents = static_cast<int>(r.integer("game.agents", 0));
  require_config(c.agents >= 1, "game.agents must be at least 1");
  const std::size_t n = static_cast<std::size_t>(c.agents);
  c.lower = broadcast(r.list("game.lower", Vec{0.0}), n, "game.lower");
  c.upper = broadcast(r.list("game.upper", Vec{1.0}), n, "game.upper");
  c.weights = broadcast(r.list("game.weights", Vec{1.0}), n, "game.weights");
  if (r.has("game.targets")) c.targets = broadcast(r.list("game.targets"), n, "game.targets");
  else { (void)r.list("game.targets"); c.targets.assign(n, 0.0); }
  c.quad = broadcast(r.list("game.quad", Vec{1.0}), n, "game.quad");
  c.coupling = broadcast(r.list("game.coupling", Vec{0.0}), n, "game.coupling");
  for (std::size_t i = 0; i < n; ++i) {
    const std::string key = "game.noise_coeff_" + std::to_string(i + 1);
    c.noise_coeff.push_back(r.list(key));
  }
  c.init = broadcast(r.list("game.init", Vec{0.0}), n, "game.init");
  c.ne = r.list("game.ne");
  c.ne_family = r.str("game.ne_family", c.ne.empty() ? "none" : "points");
  require_config(c.ne_family == "none" || c.ne_family == "points" ||
                     c.ne_family == "product-corners",
                 "game.ne_family must be none, points or product-corners");

  c.alpha = broadcast(r.list("algorithm.alpha", Vec{0.1}), n, "algorithm.alpha");
  c.mu = broadcast(r.list("algorithm.mu", Vec{0.5}), n, "algorithm.mu");
  c.lambda = broadcast(r.list("algorithm.lambda", Vec{1.0}), n, "algorithm.lambda");
  c.kappa = broadcast(r.list("algorithm.kappa", Vec{2.0}), n, "algorithm.kappa");
  if (r.has("algorithm.amicability"))
    c.amicability = broadcast(r.list("algorithm.amicability"), n, "algorithm.amicability");
  else
    (void)r.list("algorithm.amicability");
  if (r.has("algorithm.locality"))
    c.locality = broadcast(r.list("algorithm.locality"), n, "algorithm.locality");
  else
    (void)r.list("algorithm.locality");

  c.graph_kind = r.str("graph.kind", "none");
  require_config(c.graph_kind == "none" || c.graph_kind == "cycle" ||
                     c.graph_kind == "complete" || c.graph_kind == "file",
                 "graph.kind must be none, cycle, complete or file");
  c.graph_size = static_cast<int>(r.integer("graph.size", c.agents));
  c.graph_weight = r.num("graph.weight", 1.0);
  c.graph_path = r.str("graph.path", "");

  c.gains.b1 = r.num("consensus.b1", 0.5);
  c.gains.b2 = r.num("consensus.b2", 0.5);
  c.gains.b3 = r.num("consensus.b3", 1.0);
  c.t_con = static_cast<int>(r.integer("consensus.t_con", 1));
  require_config(c.t_con >= 1, "consensus.t_con must be at least 1");

  if (r.has("ambiguity.epsilon"))
    c.epsilon = broadcast(r.list("ambiguity.epsilon"), n, "ambiguity.epsilon");
  else
    (void)r.list("ambiguity.epsilon");
  if (r.has("ambiguity.theta")) {
    AmbiguitySpec spec;
    spec.theta = r.num("ambiguity.theta", 0.05);
    spec.c1 = r.num("ambiguity.c1", 1.0);
    spec.c2 = r.num("ambiguity.c2", 1.0);
    spec.a = r.num("ambiguity.a", 2.0);
    spec.validate();
    c.radius_schedule = spec;
  } else {
    (void)r.num("ambiguity.theta", 0.05);
    (void)r.num("ambiguity.c1", 1.0);
    (void)r.num("ambiguity.c2", 1.0);
    (void)r.num("ambiguity.a", 2.0);
  }
  c.estimation_constant = r.num("ambiguity.estimation_constant", 0.0);
  c.support_lower = r.list("ambiguity.support_lower");
  c.support_upper = r.list("ambiguity.support_upper");
  c.samples_file = r.str("ambiguity.samples_file", "");
  c.sample_count = static_cast<int>(r.integer("ambiguity.sample_count", 0));
  c.sample_atoms = r.list("ambiguity.sample_atoms");
  for (double o : r.list("ambiguity.owner")) {
    require_config(o >= 1.0 && o == std::floor(o) && o <= static_cast<double>(n),
                   "ambiguity.owner entries must be agent indices (1-based)");
    c.owner.push_back(static_cast<int>(o));
  }
  c.xi_mean = r.list("ambiguity.xi_mean");

  c.dro.tol = r.num("dro.tol", 1e-6);
  c.dro.max_iters = static_cast<int>(r.integer("dro.max_iters", 5000));
  c.dro.dykstra_sweeps = static_cast<int>(r.integer("dro.dykstra_sweeps", 50));
  c.pd.iters = static_cast<int>(r.integer("dro.t_opt", 200));
  c.pd.rho = r.num("dro.rho", 10.0);
  c.pd.primal_step = r.num("dro.primal_step", 0.5);
  c.pd.dual_step = r.num("dro.dual_step", 1.0);
  c.pd.dual_every = static_cast<int>(r.integer("dro.dual_every", 25));
  require_config(c.pd.dual_every >= 1, "dro.dual_every must be at least 1");
  c.cold_start = r.flag("dro.cold_start", false);
  r.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  return build_config(parse_ini_file(path));
}

std::vector<Vec> load_sample_csv(const std::string& path) {
  std::ifstream in(path);
  require_config(in.good(), "samples: cannot open " + path);
  std::vector<Vec> rows;
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
    if (!header_skipped) {
      header_skipped = true;
      bool numeric = true;
      for (const std::string& cl : cells) {
        try {
          std::size_t pos = 0;
          (void)std::stod(cl, &pos);
          if (pos != cl.size()) numeric = false;
        } catch (...) {
          numeric = false;
        }
      }
      if (!numeric) continue;  // header row
    }
    Vec row;
    for (const std::string& cl : cells) row.push_back(parse_double(cl, "samples"));
    rows.push_back(std::move(row));
  }
  require_config(!rows.empty(), "samples: no data rows in " + path);
  return rows;
}

void write_sample_csv(const std::string& path, const std::vector<Vec>& rows) {
  require_config(!rows.empty(), "samples: nothing to write");
  std::ofstream out(path);
  require_config(out.good(), "samples: cannot write " + path);
  std::vector<std::string> header;
  for (std::size_t l = 0; l < rows[0].size(); ++l)
    header.push_back("xi" + std::to_string(l + 1));
  out << join(header, ",") << "\n";
  for (const Vec& r : rows) {
    std::vector<std::string> cells;
    for (double v : r) {
      // Samples are data, not display output: 17 significant digits make the
      // write/load cycle reproduce every double bit for bit.
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      cells.emplace_back(buf);
    }
    out << join(cells, ",") << "\n";
  }
}

Instance build_instance(const ExperimentConfig& config) {
  Instance inst;
  inst.config = config;
  const std::size_t n = static_cast<std::size_t>(config.agents);

  // ----- game -----
  Game& game = inst.game;
  for (std::size_t i = 0; i < n; ++i)
    game.boxes.push_back(Box::make({config.lower[i]}, {config.upper[i]}));
  std::size_t noise_dim = std::max(config.support_lower.size(), config.owner.size());
  noise_dim = std::max(noise_dim, config.xi_mean.size());
  for (const Vec& r : config.noise_coeff) noise_dim = std::max(noise_dim, r.size());
  const UtilityFamily family = utility_family_from_string(config.family);
  if (family != UtilityFamily::AffineNoiseQuadratic) noise_dim = 0;
  game.noise_dim = noise_dim;
  for (std::size_t i = 0; i < n; ++i) {
    UtilitySpec u;
    u.family = family;
    u.agent = static_cast<int>(i);
    switch (family) {
      case UtilityFamily::WeightedAbsProduct:
        u.weight = config.weights[i];
        u.target = {config.targets[i]};
        break;
      case UtilityFamily::PureProduct:
        break;
      case UtilityFamily::Quadratic:
        u.target = {config.targets[i]};
        u.quad = {config.quad[i]};
        break;
      case UtilityFamily::AffineNoiseQuadratic: {
        u.target = {config.targets[i]};
        u.quad = {config.quad[i]};
        u.coupling = config.coupling[i];
        Vec r = config.noise_coeff[i];
        r.resize(noise_dim, 0.0);
        u.noise_coeff = std::move(r);
        break;
      }
      case UtilityFamily::UserSupplied:
        throw ConfigError("game.family=user is a library-only feature");
    }
    game.utilities.push_back(std::move(u));
  }
  game.validate();

  // ----- noise support / samples -----
  const bool needs_samples = config.mode != "stochastic-reference";
  if (!config.support_lower.empty() || !config.support_upper.empty()) {
    require_config(config.support_lower.size() == noise_dim &&
                       config.support_upper.size() == noise_dim,
                   "ambiguity.support bounds must cover every noise coordinate");
    inst.noise_support = Box::make(config.support_lower, config.support_upper);
  }
  if (!config.samples_file.empty()) {
    inst.samples.rows = load_sample_csv(config.samples_file);
  } else if (config.sample_count > 0) {
    require_config(!config.sample_atoms.empty(),
                   "ambiguity.sample_atoms required to generate samples");
    require_config(noise_dim > 0, "sample generation needs a noise-coupled family");
    Rng rng(derive_seed(config.seed, 777));
    for (int k = 0; k < config.sample_count; ++k) {
      Vec row(noise_dim);
      for (std::size_t l = 0; l < noise_dim; ++l)
        row[l] = config.sample_atoms[uniform_index(rng, config.sample_atoms.size())];
      inst.samples.rows.push_back(std::move(row));
    }
  }
  if (!config.owner.empty()) {
    require_config(config.owner.size() == noise_dim,
                   "ambiguity.owner must assign every noise coordinate");
    std::vector<std::pair<std::size_t, std::size_t>> slices(n, {0, 0});
    int prev_owner = 0;
    for (std::size_t l = 0; l < config.owner.size(); ++l) {
      const int o = config.owner[l];
      require_config(o >= prev_owner,
                     "ambiguity.owner must list agents in ascending contiguous runs");
      if (o != prev_owner) slices[static_cast<std::size_t>(o - 1)].first = l;
      slices[static_cast<std::size_t>(o - 1)].second = l + 1;
      prev_owner = o;
    }
    inst.samples.slices = std::move(slices);
  }
  if (needs_samples) {
    require_config(!inst.samples.rows.empty(),
                   "mode " + config.mode + " requires samples (file or generator)");
    require_config(inst.noise_support.has_value(),
                   "mode " + config.mode + " requires ambiguity.support bounds");
    inst.samples.validate(n);
    for (const Vec& row : inst.samples.rows)
      require_config(inst.noise_support->contains(row, 1e-9),
                     "samples must lie inside the support box");
    if (config.mode == "dro-individual" || config.mode == "dro-shared")
      require_config(!inst.samples.slices.empty(),
                     "mode " + config.mode + " requires ambiguity.owner slices");
  }

  // ----- radii -----
  if (needs_samples) {
    if (!config.epsilon.empty()) {
      inst.epsilon = config.epsilon;
    } else {
      require_config(config.radius_schedule.has_value(),
                     "provide ambiguity.epsilon or the radius schedule (theta/c1/c2/a)");
      inst.epsilon.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        inst.epsilon[i] = wasserstein_radius(inst.samples.count(),
                                             inst.samples.dim_for_agent(static_cast<int>(i)),
                                             *config.radius_schedule);
    }
    if (config.estimation_constant > 0.0 && config.architecture == "distributed")
      for (double& e : inst.epsilon) e = inflate_radius(e, config.estimation_constant);
  }

  // ----- reference noise vector -----
  if (noise_dim > 0) {
    if (!config.xi_mean.empty()) {
      require_config(config.xi_mean.size() == noise_dim,
                     "ambiguity.xi_mean must cover every noise coordinate");
      inst.xi_reference = config.xi_mean;
    } else if (!inst.samples.rows.empty()) {
      inst.xi_reference.assign(noise_dim, 0.0);
      for (const Vec& row : inst.samples.rows)
        for (std::size_t l = 0; l < noise_dim; ++l) inst.xi_reference[l] += row[l];
      for (double& v : inst.xi_reference) v /= static_cast<double>(inst.samples.count());
    } else {
      throw ConfigError("noise-coupled family needs ambiguity.xi_mean or samples");
    }
  }

  // ----- parameters -----
  AlgoParams& p = inst.params;
  p.alpha = config.alpha;
  p.mu = config.mu;
  p.lambda = config.lambda;
  p.kappa = config.kappa;
  if (!config.amicability.empty()) {
    p.amicability = config.amicability;
  } else {
    p.amicability.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      p.amicability[i] = default_amicability(game, static_cast<int>(i));
  }
  if (!config.locality.empty()) {
    p.locality = config.locality;
  } else {
    double acc = 0.0;
    for (const Box& b : game.boxes) acc += b.diameter() * b.diameter();
    p.locality.assign(n, std::sqrt(acc));
  }
  const ValidityReport report = validate_params(p, game.boxes);
  if (!report.ok)
    throw ConfigError("invalid algorithm parameters:\n  " + join(report.violations, "\n  "));

  // ----- bound constants -----
  Vec grad_bounds(n);
  const Box* support = inst.noise_support.has_value() ? &*inst.noise_support : nullptr;
  for (std::size_t i = 0; i < n; ++i)
    grad_bounds[i] = supergradient_bound(game, static_cast<int>(i), support);
  inst.bounds = bound_constants(p, grad_bounds, game.boxes, config.margin);

  // ----- initial profile / equilibrium declarations -----
  for (std::size_t i = 0; i < n; ++i)
    require_config(game.boxes[i].contains({config.init[i]}, 0.0),
                   "game.init must lie inside the strategy boxes");
  if (config.ne_family == "points")
    require_config(config.ne.size() == n, "game.ne must declare one value per agent");
  if (config.ne_family == "product-corners")
    require_config(family == UtilityFamily::PureProduct && n <= 16,
                   "product-corners equilibrium family applies to pure-product games (n <= 16)");

  // ----- graph -----
  if (config.architecture == "distributed" || config.mode == "dro-shared") {
    require_config(config.graph_kind != "none",
                   "distributed runs require a [graph] section");
    Digraph g;
    if (config.graph_kind == "cycle") g = Digraph::cycle(config.graph_size, config.graph_weight);
    else if (config.graph_kind == "complete")
      g = Digraph::complete(config.graph_size, config.graph_weight);
    else g = Digraph::load(config.graph_path);
    require_config(g.nodes == config.agents, "graph must have one node per agent");
    // Early spectral check: construction fails fast on non-contracting gains.
    (void)ConsensusSystem::make(g, config.gains);
    inst.graph = std::move(g);
  }
  require_config(!(config.mode == "dro-shared" && config.architecture != "distributed"),
                 "mode dro-shared requires architecture = distributed");
  return inst;
}

namespace {

// Members of the declared equilibrium set, as profiles.
std::vector<Vec> equilibrium_members(const Instance& inst) {
  const ExperimentConfig& c = inst.config;
  std::vector<Vec> members;
  if (c.ne_family == "points") {
    members.push_back(c.ne);
  } else if (c.ne_family == "product-corners") {
    const std::size_t n = static_cast<std::size_t>(c.agents);
    members.emplace_back(n, 0.0);
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
      if (__builtin_popcount(static_cast<unsigned>(mask)) % 2 != 0) continue;
      Vec corner(n);
      for (std::size_t i = 0; i < n; ++i)
        corner[i] = (mask >> i) & 1u ? inst.game.boxes[i].lower[0] : inst.game.boxes[i].upper[0];
      members.push_back(std::move(corner));
    }
  }
  return members;
}

double equilibrium_distance(const std::vector<Vec>& members, const Profile& s) {
  if (members.empty()) return kNaN;
  const Vec flat = s.flatten();
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& m : members) best = std::min(best, dist_inf(flat, m));
  return best;
}

struct SeriesBundle {
  Vec value, dist_ne, eta, tracking, direction_gap, vertex_gap, consensus_residual,
      budget_residual;
};

}  // namespace

double RunResult::steady_state_mean(const Vec& series) const {
  if (series.empty()) return kNaN;
  const std::size_t k = std::max<std::size_t>(1, series.size() / 10);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t idx = series.size() - k; idx < series.size(); ++idx) {
    if (std::isnan(series[idx])) continue;
    acc += series[idx];
    ++count;
  }
  return count == 0 ? kNaN : acc / static_cast<double>(count);
}

long RunResult::steps_to_ball(double radius) const {
  if (dist_ne.empty() || std::isnan(dist_ne.back()) || dist_ne.back() > radius) return -1;
  long entry = static_cast<long>(dist_ne.size()) - 1;
  for (long t = static_cast<long>(dist_ne.size()) - 1; t >= 0; --t) {
    if (std::isnan(dist_ne[static_cast<std::size_t>(t)]) ||
        dist_ne[static_cast<std::size_t>(t)] > radius)
      break;
    entry = t;
  }
  return entry;
}

RunResult run_experiment(const ExperimentConfig& config, const StepHook& hook) {
  const auto clock_start = std::chrono::steady_clock::now();
  RunResult result;
  result.instance = build_instance(config);
  Instance& inst = result.instance;
  const Game& game = inst.game;
  const std::size_t n = game.agents();
  const std::vector<Box>& boxes = game.boxes;
  const long horizon = config.horizon;
  const bool distributed = config.architecture == "distributed";
  const bool shared = config.mode == "dro-shared";
  const bool individual = config.mode == "dro-individual";

  Profile start;
  for (std::size_t i = 0; i < n; ++i) start.blocks.push_back({config.init[i]});

  // Per-agent slice supports for individual mode.
  std::vector<Box> slice_support;
  if (individual) {
    for (std::size_t i = 0; i < n; ++i) {
      if (inst.samples.slices.empty()) {
        slice_support.push_back(*inst.noise_support);
      } else {
        const auto [b, e] = inst.samples.slices[i];
        slice_support.push_back(Box::make(
            Vec(inst.noise_support->lower.begin() + static_cast<long>(b),
                inst.noise_support->lower.begin() + static_cast<long>(e)),
            Vec(inst.noise_support->upper.begin() + static_cast<long>(b),
                inst.noise_support->upper.begin() + static_cast<long>(e))));
      }
    }
  }

  // Shared-sample distributed program state.
  ScenarioProgram program;
  PdState pd;
  if (shared) {
    program.game = &game;
    program.samples = inst.samples;
    program.support = *inst.noise_support;
    program.eps = inst.epsilon;
    program.validate();
    pd = pd_init(program);
  }

  // Warm caches (estimate-based and exact-information solves kept apart).
  auto warm_est = std::make_shared<std::vector<ScenarioSolution>>(n);
  auto warm_exact = std::make_shared<std::vector<ScenarioSolution>>(n);
  auto have_est = std::make_shared<std::vector<char>>(n, 0);
  auto have_exact = std::make_shared<std::vector<char>>(n, 0);

  // Supergradient selection v_i at a profile, per information mode.
  auto make_field = [&](bool exact_info) {
    return [&, exact_info](int agent, const Profile& p) -> Vec {
      const std::size_t ai = static_cast<std::size_t>(agent);
      GradientInterval interval{{}, {}};
      if (config.mode == "stochastic-reference") {
        interval = own_supergradient(game, agent, p, inst.xi_reference);
      } else if (individual) {
        auto& cache = exact_info ? (*warm_exact)[ai] : (*warm_est)[ai];
        auto& have = exact_info ? (*have_exact)[ai] : (*have_est)[ai];
        const ScenarioSolution* warm = (!config.cold_start && have) ? &cache : nullptr;
        ScenarioSolution sol = individual_dro_value(game, agent, p, inst.samples,
                                                    inst.epsilon[ai], slice_support[ai],
                                                    config.dro, warm);
        interval = dro_supergradient(game, agent, p, inst.samples, sol);
        cache = std::move(sol);
        have = 1;
      } else {  // dro-shared
        if (exact_info) {
          auto& cache = (*warm_exact)[ai];
          const ScenarioSolution* warm = (!config.cold_start && (*have_exact)[ai]) ? &cache : nullptr;
          ScenarioSolution sol = dro_value(game, agent, p, inst.samples, inst.epsilon[ai],
                                           *inst.noise_support, config.dro, warm);
          interval = dro_supergradient(game, agent, p, inst.samples, sol);
          cache = std::move(sol);
          (*have_exact)[ai] = 1;
        } else {
          const Vec ybar = pd_mean_scenario(pd, agent);
          interval = own_supergradient(game, agent, p, ybar);
        }
      }
      return min_norm_supergradient(interval, p.blocks[ai], boxes[ai]);
    };
  };
  const auto exact_field = make_field(true);
  const auto est_field = make_field(false);
  const VField exact_vfield = [&](const Profile& p) {
    std::vector<Vec> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = exact_field(static_cast<int>(i), p);
    return v;
  };

  // Best-response residual evaluator for the active objective.
  const ObjectiveFn objective = [&](int agent, const Profile& p) -> double {
    if (config.mode == "stochastic-reference")
      return utility_eval(game, agent, p, inst.xi_reference);
    if (individual)
      return individual_dro_value(game, agent, p, inst.samples,
                                  inst.epsilon[static_cast<std::size_t>(agent)],
                                  slice_support[static_cast<std::size_t>(agent)], config.dro)
          .value;
    return dro_value(game, agent, p, inst.samples, inst.epsilon[static_cast<std::size_t>(agent)],
                     *inst.noise_support, config.dro)
        .value;
  };

  const std::vector<Vec> eq_members = equilibrium_members(inst);

  // Column layout.
  std::vector<std::string> columns{"t"};
  for (std::size_t i = 0; i < n; ++i) columns.push_back("s" + std::to_string(i + 1));
  columns.insert(columns.end(), {"V", "dist_ne", "eta"});
  if (distributed) columns.insert(columns.end(), {"tracking", "direction_gap", "vertex_gap"});
  if (shared) columns.insert(columns.end(), {"consensus_residual", "budget_residual"});

  SeriesBundle series;
  TrajectoryRecord& traj = result.trajectory;
  traj.columns = columns;

  auto eta_due = [&](long t) {
    if (t == horizon) return true;
    return config.eta_cadence > 0 && t % config.eta_cadence == 0;
  };
  auto push_row = [&](long t, const Profile& s, double value, double tracking,
                      double direction_gap, double vertex_gap, double consensus_res,
                      double budget_res) {
    const double dist = equilibrium_distance(eq_members, s);
    const double eta =
        eta_due(t) ? best_response_residual(boxes, objective, s, config.eta_grid) : kNaN;
    require(value < 1e9 && !std::isnan(value), "run: Lyapunov value diverged");
    Vec row;
    row.push_back(static_cast<double>(t));
    for (const Vec& block : s.blocks) row.insert(row.end(), block.begin(), block.end());
    row.insert(row.end(), {value, dist, eta});
    if (distributed) row.insert(row.end(), {tracking, direction_gap, vertex_gap});
    if (shared) row.insert(row.end(), {consensus_res, budget_res});
    series.value.push_back(value);
    series.dist_ne.push_back(dist);
    series.eta.push_back(eta);
    if (distributed) {
      series.tracking.push_back(tracking);
      series.direction_gap.push_back(direction_gap);
      series.vertex_gap.push_back(vertex_gap);
    }
    if (shared) {
      series.consensus_residual.push_back(consensus_res);
      series.budget_residual.push_back(budget_res);
    }
    if (hook) hook(t, columns, row);
    traj.rows.push_back(std::move(row));
  };

  if (!distributed) {
    DynamicsState state = init_dynamics(start);
    for (long t = 0; t < horizon; ++t) {
      StepInfo info;
      DynamicsState next = dynamics_step(state, exact_vfield, inst.params, boxes, &info);
      const double value = lyapunov_value(state.current, info.phi, boxes);
      push_row(t, state.current, value, kNaN, kNaN, kNaN, kNaN, kNaN);
      state = std::move(next);
    }
    // Final row: compose the direction field once more without stepping.
    std::vector<Vec> phi(n);
    const std::vector<Vec> v = exact_vfield(state.current);
    for (std::size_t i = 0; i < n; ++i)
      phi[i] = compose_phi(inst.params.mu[i], v[i], inst.params.lambda[i],
                           state.current.blocks[i], state.previous.blocks[i]);
    push_row(horizon, state.current, lyapunov_value(state.current, phi, boxes), kNaN, kNaN,
             kNaN, kNaN, kNaN);
    result.final_profile = state.current;
  } else {
    ConsensusSystem system = ConsensusSystem::make(*inst.graph, config.gains);
    Rng rng(derive_seed(config.seed, 42));
    NetworkState net = init_network(start, boxes, system, rng);
    for (long t = 0; t < horizon; ++t) {
      if (shared) {
        if (config.cold_start) pd = pd_init(program);
        pd_iterate(pd, program, net.dyn.current, *inst.graph, config.pd);
      }
      RoundLog log;
      NetworkState next = network_round(net, est_field, exact_field, inst.params, boxes, system,
                                        config.t_con, &log);
      const double value = lyapunov_value(net.dyn.current, log.phi_exact, boxes);
      double cres = kNaN, bres = kNaN;
      if (shared) {
        const PdDiagnostics diag = pd_diagnostics(pd, program, net.dyn.current);
        cres = diag.consensus_residual;
        bres = diag.budget_residual;
      }
      push_row(t, net.dyn.current, value, log.tracking, log.direction_gap, log.vertex_gap, cres,
               bres);
      net = std::move(next);
    }
    std::vector<Vec> phi(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec v = exact_field(static_cast<int>(i), net.dyn.current);
      phi[i] = compose_phi(inst.params.mu[i], v, inst.params.lambda[i],
                           net.dyn.current.blocks[i], net.dyn.previous.blocks[i]);
    }
    push_row(horizon, net.dyn.current, lyapunov_value(net.dyn.current, phi, boxes), kNaN, kNaN,
             kNaN, kNaN, kNaN);
    result.final_profile = net.dyn.current;
  }

  result.value = series.value;
  result.dist_ne = series.dist_ne;
  result.eta_residual = series.eta;
  result.tracking = series.tracking;
  result.direction_gap = series.direction_gap;
  result.vertex_gap = series.vertex_gap;
  result.consensus_residual = series.consensus_residual;
  result.budget_residual = series.budget_residual;

  // Lyapunov decrement audit.
  long violations = 0;
  double slack_min = std::numeric_limits<double>::infinity();
  const double allowance = distributed ? 1e-6 : 1e-7;
  const double alpha_min = inst.params.alpha_min();
  const double budget_per_step = inst.bounds.total_cost * inst.bounds.rho1_value;
  for (std::size_t t = 0; t + 1 < result.value.size(); ++t) {
    double rhs = -alpha_min * result.value[t] + budget_per_step;
    if (distributed) rhs += inst.bounds.rho2_value * result.vertex_gap[t];
    const double lhs = result.value[t + 1] - result.value[t];
    slack_min = std::min(slack_min, rhs - lhs);
    if (lhs > rhs + allowance) ++violations;
  }

  const auto clock_end = std::chrono::steady_clock::now();
  result.wall_seconds =
      std::chrono::duration_cast<std::chrono::duration<double>>(clock_end - clock_start).count();

  auto& summary = result.summary;
  auto put = [&](const std::string& key, const std::string& value) {
    summary.emplace_back(key, value);
  };
  auto putd = [&](const std::string& key, double value) { put(key, format_double(value)); };
  auto last_finite = [](const Vec& series) {
    for (auto it = series.rbegin(); it != series.rend(); ++it)
      if (!std::isnan(*it)) return *it;
    return std::numeric_limits<double>::quiet_NaN();
  };
  put("name", config.name);
  put("architecture", config.architecture);
  put("mode", config.mode);
  putd("horizon", static_cast<double>(horizon));
  putd("seed", static_cast<double>(config.seed));
  {
    std::vector<std::string> parts;
    for (const Vec& b : result.final_profile.blocks)
      for (double x : b) parts.push_back(format_double(x));
    put("final_profile", join(parts, " "));
  }
  putd("value_final", result.value.back());
  putd("value_steady", result.steady_state_mean(result.value));
  putd("value_peak", *std::max_element(result.value.begin(), result.value.end()));
  putd("dist_ne_final", result.dist_ne.back());
  putd("dist_ne_steady", result.steady_state_mean(result.dist_ne));
  putd("steps_to_ball_0.1", static_cast<double>(result.steps_to_ball(0.1)));
  putd("eta_final", result.eta_residual.back());
  if (!inst.epsilon.empty()) {
    std::vector<std::string> parts;
    for (double e : inst.epsilon) parts.push_back(format_double(e));
    put("epsilon", join(parts, " "));
    Vec lips(n);
    const Box* support = inst.noise_support.has_value() ? &*inst.noise_support : nullptr;
    for (std::size_t i = 0; i < n; ++i)
      lips[i] = noise_lipschitz(game, static_cast<int>(i), support);
    putd("eta_bound", eta_bound(inst.epsilon, lips, config.estimation_constant));
  }
  putd("alpha_min", alpha_min);
  putd("decrement_budget", budget_per_step);
  putd("rho1", inst.bounds.rho1_value);
  putd("rho2", inst.bounds.rho2_value);
  putd("total_cost", inst.bounds.total_cost);
  putd("joint_reach", inst.bounds.joint_reach);
  putd("ceiling", inst.bounds.ceiling);
  putd("ceiling_perturbed", inst.bounds.ceiling_perturbed);
  putd("lyapunov_violations", static_cast<double>(violations));
  putd("lyapunov_slack_min", slack_min);
  if (distributed) {
    putd("tracking_final", last_finite(result.tracking));
    putd("tracking_steady", result.steady_state_mean(result.tracking));
  }
  if (shared) {
    putd("consensus_residual_final", last_finite(result.consensus_residual));
    putd("budget_residual_final", last_finite(result.budget_residual));
  }
  return result;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<Vec>& rows) {
  std::ofstream out(path);
  require_config(out.good(), "csv: cannot write " + path);
  out << join(columns, ",") << "\n";
  for (const Vec& row : rows) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(std::isnan(v) ? "" : format_double(v));
    out << join(cells, ",") << "\n";
  }
}

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<std::string>& names, const std::vector<Vec>& series) {
  require(!series.empty() && names.size() == series.size(), "svg: malformed series");
  const double width = 960, height = 500, ml = 70, mr = 20, mt = 40, mb = 40;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t len = 0;
  for (const Vec& s : series) {
    len = std::max(len, s.size());
    for (double v : s)
      if (!std::isnan(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  }
  if (!(hi > lo)) {
    hi = lo + 1.0;
  }
  const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                           "#9467bd", "#8c564b", "#17becf", "#e377c2"};
  std::ofstream out(path);
  require_config(out.good(), "svg: cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << ml - 8 << "\" y=\"" << height - mb << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(lo) << "</text>\n";
  out << "<text x=\"" << ml - 8 << "\" y=\"" << mt + 10 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(hi) << "</text>\n";
  auto sx = [&](std::size_t idx) {
    return ml + (width - ml - mr) * (len <= 1 ? 0.0 : static_cast<double>(idx) / (len - 1));
  };
  auto sy = [&](double v) { return height - mb - (height - mt - mb) * (v - lo) / (hi - lo); };
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::ostringstream pts;
    bool open = false;
    out << "<polyline fill=\"none\" stroke=\"" << palette[s % 8] << "\" stroke-width=\"1.3\" points=\"";
    for (std::size_t idx = 0; idx < series[s].size(); ++idx) {
      const double v = series[s][idx];
      if (std::isnan(v)) continue;
      out << sx(idx) << "," << sy(v) << " ";
      open = true;
    }
    (void)open;
    (void)pts;
    out << "\"/>\n";
    out << "<text x=\"" << width - mr - 120 << "\" y=\"" << mt + 16 * (s + 1)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << palette[s % 8] << "\">"
        << names[s] << "</text>\n";
  }
  out << "</svg>\n";
}

void write_outputs(const RunResult& result, bool plots) {
  const std::string dir = result.instance.config.out_dir;
  std::filesystem::create_directories(dir);
  write_csv(dir + "/trajectory.csv", result.trajectory.columns, result.trajectory.rows);
  {
    std::ofstream out(dir + "/summary.csv");
    require_config(out.good(), "summary: cannot write " + dir + "/summary.csv");
    out << "key,value\n";
    for (const auto& [k, v] : result.summary) out << k << "," << v << "\n";
  }
  if (plots) {
    const std::size_t n = result.instance.game.agents();
    std::vector<std::string> names;
    std::vector<Vec> strat(n);
    for (std::size_t i = 0; i < n; ++i) {
      names.push_back("s" + std::to_string(i + 1));
      for (const Vec& row : result.trajectory.rows) strat[i].push_back(row[1 + i]);
    }
    write_svg_chart(dir + "/strategies.svg", "strategy trajectories", names, strat);
    write_svg_chart(dir + "/value.svg", "Lyapunov value", {"V"}, {result.value});
    if (!result.tracking.empty())
      write_svg_chart(dir + "/tracking.svg", "estimator tracking error", {"tracking"},
                      {result.tracking});
  }
}

namespace {

struct BuiltinEntry {
  const char* name;
  const char* text;
};

const BuiltinEntry kBuiltins[] = {
    {"case1_alpha_0p1", R"cfg(# Six agents with kinked product payoffs on [0, 2]; fast step size.
[run]
name = case1_alpha_0p1
architecture = centralized
mode = stochastic-reference
horizon = 5000
seed = 1
out = out/case1_alpha_0p1

[game]
family = weighted-abs-product
agents = 6
lower = 0
upper = 2
weights = 1
targets = 0.25 0.5 0.75 1 1.25 1.5
init = 0.097 0.578 1.442 0.043 0.412 0.101
ne = 0.25 0.5 0.75 1 1.25 1.5
ne_family = points

[algorithm]
alpha = 0.1
mu = 0.5
lambda = 1
kappa = 4
amicability = 1
)cfg"},
    {"case1_alpha_0p01", R"cfg(# Six agents with kinked product payoffs on [0, 2]; cautious step size.
[run]
name = case1_alpha_0p01
architecture = centralized
mode = stochastic-reference
horizon = 5000
seed = 1
out = out/case1_alpha_0p01

[game]
family = weighted-abs-product
agents = 6
lower = 0
upper = 2
weights = 1
targets = 0.25 0.5 0.75 1 1.25 1.5
init = 0.097 0.578 1.442 0.043 0.412 0.101
ne = 0.25 0.5 0.75 1 1.25 1.5
ne_family = points

[algorithm]
alpha = 0.01
mu = 0.5
lambda = 1
kappa = 4
amicability = 1
)cfg"},
    {"case2_tcon10", R"cfg(# Six agents with pure product payoffs on [-2, 2] over a directed ring.
[run]
name = case2_tcon10
architecture = distributed
mode = stochastic-reference
horizon = 2500
seed = 3
out = out/case2_tcon10

[game]
family = pure-product
agents = 6
lower = -2
upper = 2
init = -1.805 -0.844 0.884 -1.913 -1.176 -1.797
ne_family = product-corners

[algorithm]
alpha = 0.01
mu = 0.5
lambda = 3
kappa = 2
amicability = 0.5

[graph]
kind = cycle
size = 6

[consensus]
b1 = 0.1
b2 = 0.05
b3 = 0.1
t_con = 10
)cfg"},
    {"case2_tcon50", R"cfg(# Six agents with pure product payoffs on [-2, 2] over a directed ring.
[run]
name = case2_tcon50
architecture = distributed
mode = stochastic-reference
horizon = 2500
seed = 3
out = out/case2_tcon50

[game]
family = pure-product
agents = 6
lower = -2
upper = 2
init = -1.805 -0.844 0.884 -1.913 -1.176 -1.797
ne_family = product-corners

[algorithm]
alpha = 0.01
mu = 0.5
lambda = 3
kappa = 2
amicability = 0.5

[graph]
kind = cycle
size = 6

[consensus]
b1 = 0.1
b2 = 0.05
b3 = 0.1
t_con = 50
)cfg"},
    {"case2_tcon100", R"cfg(# Six agents with pure product payoffs on [-2, 2] over a directed ring.
[run]
name = case2_tcon100
architecture = distributed
mode = stochastic-reference
horizon = 2500
seed = 3
out = out/case2_tcon100

[game]
family = pure-product
agents = 6
lower = -2
upper = 2
init = -1.805 -0.844 0.884 -1.913 -1.176 -1.797
ne_family = product-corners

[algorithm]
alpha = 0.01
mu = 0.5
lambda = 3
kappa = 2
amicability = 0.5

[graph]
kind = cycle
size = 6

[consensus]
b1 = 0.1
b2 = 0.05
b3 = 0.1
t_con = 100
)cfg"},
    {"case2_tcon100_alpha_0p1", R"cfg(# Six agents with pure product payoffs on [-2, 2]; aggressive step size.
[run]
name = case2_tcon100_alpha_0p1
architecture = distributed
mode = stochastic-reference
horizon = 2500
seed = 3
out = out/case2_tcon100_alpha_0p1

[game]
family = pure-product
agents = 6
lower = -2
upper = 2
init = -1.805 -0.844 0.884 -1.913 -1.176 -1.797
ne_family = product-corners

[algorithm]
alpha = 0.1
mu = 0.5
lambda = 3
kappa = 2
amicability = 0.5

[graph]
kind = cycle
size = 6

[consensus]
b1 = 0.1
b2 = 0.05
b3 = 0.1
t_con = 100
)cfg"},
    {"dro_individual_demo", R"cfg(# Two agents hedging against per-agent scenario balls around sampled noise.
[run]
name = dro_individual_demo
architecture = centralized
mode = dro-individual
horizon = 600
seed = 7
out = out/dro_individual_demo

[game]
family = affine-noise-quadratic
agents = 2
lower = 0
upper = 2
quad = 1
targets = 0.8 1.2
coupling = 0.25
noise_coeff_1 = 1 0
noise_coeff_2 = 0 1
init = 0.2 1.9

[algorithm]
alpha = 0.25
mu = 0.4
lambda = 1
kappa = 3

[ambiguity]
support_lower = 0 0
support_upper = 1 1
owner = 1 2
sample_count = 8
sample_atoms = 0.2 0.4 0.6 0.8
theta = 0.05
c1 = 1
c2 = 1
a = 2
)cfg"},
    {"dro_shared_demo", R"cfg(# Three agents sharing one scenario pool over a directed ring.
[run]
name = dro_shared_demo
architecture = distributed
mode = dro-shared
horizon = 120
seed = 9
out = out/dro_shared_demo

[game]
family = affine-noise-quadratic
agents = 3
lower = 0
upper = 1
quad = 1
targets = 0.3 0.5 0.7
coupling = 0.1
noise_coeff_1 = 1 0 0
noise_coeff_2 = 0 1 0
noise_coeff_3 = 0 0 1
init = 0.9 0.1 0.5

[algorithm]
alpha = 0.2
mu = 0.3
lambda = 1
kappa = 3

[graph]
kind = cycle
size = 3

[consensus]
t_con = 30

[ambiguity]
support_lower = 0 0 0
support_upper = 1 1 1
owner = 1 2 3
sample_count = 4
sample_atoms = 0.25 0.5 0.75
epsilon = 0.15
estimation_constant = 0.5

[dro]
t_opt = 150
)cfg"},
};

}  // namespace

std::vector<std::string> builtin_config_names() {
  std::vector<std::string> names;
  for (const BuiltinEntry& e : kBuiltins) names.push_back(e.name);
  return names;
}

std::string builtin_config_text(const std::string& name) {
  for (const BuiltinEntry& e : kBuiltins)
    if (name == e.name) return e.text;
  throw ConfigError("unknown builtin configuration '" + name + "'");
}

ExperimentConfig builtin_config(const std::string& name) {
  return build_config(parse_ini_text(builtin_config_text(name), "builtin:" + name));
}

std::vector<RunResult> replicate_benchmark(const std::string& which, const std::string& out_root,
                                           bool plots) {
  std::vector<std::string> selected;
  for (const BuiltinEntry& e : kBuiltins) {
    const std::string name = e.name;
    const bool is_case1 = name.rfind("case1", 0) == 0;
    const bool is_case2 = name.rfind("case2", 0) == 0;
    const bool is_dro = name.rfind("dro", 0) == 0;
    if (which == "all" || (which == "case1" && is_case1) || (which == "case2" && is_case2) ||
        (which == "dro" && is_dro))
      selected.push_back(name);
  }
  require_config(!selected.empty(),
                 "replicate: unknown selection '" + which + "' (case1, case2, dro, all)");
  std::vector<RunResult> results;
  std::vector<std::vector<std::string>> table;
  for (const std::string& name : selected) {
    ExperimentConfig cfg = builtin_config(name);
    cfg.out_dir = out_root + "/" + name;
    RunResult res = run_experiment(cfg);
    write_outputs(res, plots);
    std::vector<std::string> row{
        name,
        format_double(cfg.alpha[0]),
        std::to_string(cfg.architecture == "distributed" ? cfg.t_con : 0),
        format_double(static_cast<double>(res.steps_to_ball(0.1))),
        format_double(res.steady_state_mean(res.dist_ne)),
        format_double(res.value.back()),
        format_double(res.eta_residual.back())};
    table.push_back(std::move(row));
    results.push_back(std::move(res));
  }
  std::filesystem::create_directories(out_root);
  std::ofstream out(out_root + "/comparison.csv");
  require_config(out.good(), "replicate: cannot write comparison.csv");
  out << "name,alpha,t_con,steps_to_ball_0.1,dist_ne_steady,value_final,eta_final\n";
  for (const auto& row : table) out << join(row, ",") << "\n";
  return results;
}

SweepAxis parse_sweep_axis(const std::string& text) {
  const std::size_t eq = text.find('=');
  require_config(eq != std::string::npos && eq > 0,
                 "sweep: expected section.key=v1,v2,... got '" + text + "'");
  SweepAxis axis;
  axis.key = trim(text.substr(0, eq));
  require_config(axis.key.find('.') != std::string::npos,
                 "sweep: axis key must be section.key");
  std::stringstream vs(text.substr(eq + 1));
  std::string tok;
  while (std::getline(vs, tok, ',')) {
    tok = trim(tok);
    require_config(!tok.empty(), "sweep: empty value in axis '" + text + "'");
    axis.values.push_back(tok);
  }
  require_config(!axis.values.empty(), "sweep: axis needs at least one value");
  return axis;
}

std::vector<RunResult> run_sweep(const ConfigMap& base, const std::vector<SweepAxis>& axes,
                                 const std::string& out_root, bool plots) {
  require_config(!axes.empty(), "sweep: at least one axis required");
  std::size_t points = 1;
  for (const SweepAxis& axis : axes) points *= axis.values.size();
  require_config(points <= 64, "sweep: too many grid points (cap 64)");

  std::vector<RunResult> results;
  std::vector<std::vector<std::string>> table;
  for (std::size_t idx = 0; idx < points; ++idx) {
    ConfigMap map = base;
    std::size_t rem = idx;
    std::vector<std::string> assignment;
    for (const SweepAxis& axis : axes) {
      const std::string& v = axis.values[rem % axis.values.size()];
      rem /= axis.values.size();
      map[axis.key] = v;
      assignment.push_back(axis.key + "=" + v);
    }
    ExperimentConfig cfg = build_config(map);
    cfg.name = cfg.name + "_p" + std::to_string(idx);
    cfg.out_dir = out_root + "/point_" + std::to_string(idx);
    RunResult res = run_experiment(cfg);
    write_outputs(res, plots);
    table.push_back({std::to_string(idx), join(assignment, " "),
                     format_double(res.dist_ne.back()),
                     format_double(res.value.back()),
                     format_double(res.eta_residual.back()),
                     format_double(static_cast<double>(res.steps_to_ball(0.1)))});
    results.push_back(std::move(res));
  }
  std::filesystem::create_directories(out_root);
  std::ofstream out(out_root + "/sweep.csv");
  require_config(out.good(), "sweep: cannot write sweep.csv");
  out << "point,assignment,dist_ne_final,value_final,eta_final,steps_to_ball_0.1\n";
  for (const auto& row : table) out << join(row, ",") << "\n";
  return results;
}

}  // namespace drone
