// Python bindings for the main library operations: ambiguity-set sizing,
// exact discrete transport distances, the box/simplex projections, the
// direction-field helpers, and the experiment runner.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drone/ambiguity.hpp"
#include "drone/common.hpp"
#include "drone/dro.hpp"
#include "drone/dynamics.hpp"
#include "drone/experiment.hpp"
#include "drone/game.hpp"

namespace py = pybind11;
using namespace drone;

namespace {

DiscreteDistribution make_distribution(std::vector<Vec> atoms, std::optional<Vec> weights) {
  DiscreteDistribution d;
  if (weights) {
    d.atoms = std::move(atoms);
    d.weights = std::move(*weights);
    d.validate();
    return d;
  }
  return DiscreteDistribution::uniform(std::move(atoms));
}

GroundMetric metric_from_string(const std::string& name) {
  if (name == "l1") return GroundMetric::L1;
  if (name == "euclidean") return GroundMetric::Euclidean;
  throw ConfigError("metric must be 'l1' or 'euclidean', got '" + name + "'");
}

py::dict run_to_dict(const RunResult& r) {
  py::dict out;
  py::dict summary;
  for (const auto& [key, value] : r.summary) summary[py::str(key)] = value;
  out["summary"] = summary;
  out["final_profile"] = r.final_profile.blocks;
  out["value"] = r.value;
  out["dist_ne"] = r.dist_ne;
  out["eta_residual"] = r.eta_residual;
  out["columns"] = r.trajectory.columns;
  return out;
}

}  // namespace

PYBIND11_MODULE(_drone, m) {
  m.doc() = "Robust equilibrium-seeking toolkit: ambiguity radii, exact "
            "discrete transport distances, projection and direction-field "
            "helpers, and the experiment runner.";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<InvariantError>(m, "InvariantError");

  m.def(
      "wasserstein_radius",
      [](std::size_t num_samples, std::size_t dim, double theta, double c1, double c2,
         double a) {
        AmbiguitySpec spec;
        spec.theta = theta;
        spec.c1 = c1;
        spec.c2 = c2;
        spec.a = a;
        return wasserstein_radius(num_samples, dim, spec);
      },
      py::arg("num_samples"), py::arg("dim"), py::arg("theta") = 0.05, py::arg("c1") = 1.0,
      py::arg("c2") = 1.0, py::arg("a") = 2.0,
      "Finite-sample ball radius covering the true distribution with "
      "probability at least 1 - theta.");

  m.def("inflate_radius", &inflate_radius, py::arg("radius"), py::arg("estimation_constant"),
        "Radius inflation absorbing estimation error: (1 + c) * radius.");

  m.def("eta_bound", &eta_bound, py::arg("radii"), py::arg("lipschitz"),
        py::arg("estimation_constant") = 0.0,
        "Equilibrium-residual bound 2 (1 + c) max_i radius_i * lipschitz_i.");

  m.def(
      "discrete_wasserstein",
      [](std::vector<Vec> p_atoms, std::vector<Vec> q_atoms, std::optional<Vec> p_weights,
         std::optional<Vec> q_weights, const std::string& metric) {
        const DiscreteDistribution p = make_distribution(std::move(p_atoms), std::move(p_weights));
        const DiscreteDistribution q = make_distribution(std::move(q_atoms), std::move(q_weights));
        return discrete_wasserstein(p, q, metric_from_string(metric));
      },
      py::arg("p_atoms"), py::arg("q_atoms"), py::arg("p_weights") = std::nullopt,
      py::arg("q_weights") = std::nullopt, py::arg("metric") = "l1",
      "Exact type-1 transport distance between discrete distributions "
      "(uniform weights when omitted).");

  m.def("project_l1_ball", &project_l1_ball, py::arg("point"), py::arg("radius"),
        "Euclidean projection onto the l1 ball of the given radius centered "
        "at the origin.");

  m.def(
      "support_argmax",
      [](const Vec& phi, const Vec& lower, const Vec& upper) {
        return support_argmax(phi, Box::make(lower, upper));
      },
      py::arg("phi"), py::arg("lower"), py::arg("upper"),
      "Box vertex maximizing the inner product with phi (ties toward the "
      "lower corner).");

  m.def("compose_phi", &compose_phi, py::arg("mu"), py::arg("v"), py::arg("lambda_"),
        py::arg("current"), py::arg("previous"),
        "Inertial direction blend mu * v - (current - previous) / lambda_.");

  m.def("rho1", &rho1, py::arg("x"), py::arg("y"), "Decrement shaping value x - x^2 + y.");

  m.def(
      "min_norm_supergradient",
      [](const Vec& lo, const Vec& hi, const Vec& point, const Vec& box_lower,
         const Vec& box_upper, double face_tol) {
        return min_norm_supergradient(GradientInterval{lo, hi}, point,
                                      Box::make(box_lower, box_upper), face_tol);
      },
      py::arg("lo"), py::arg("hi"), py::arg("point"), py::arg("box_lower"), py::arg("box_upper"),
      py::arg("face_tol") = 0.0,
      "Normal-cone-adjusted minimum-norm supergradient selection "
      "(componentwise closed form).");

  m.def("builtin_names", &builtin_config_names, "Names of the shipped configurations.");

  m.def("builtin_config_text", &builtin_config_text, py::arg("name"),
        "INI text of a shipped configuration.");

  m.def(
      "run_builtin",
      [](const std::string& name, std::optional<long> horizon, std::optional<std::uint64_t> seed) {
        ExperimentConfig cfg = builtin_config(name);
        if (horizon) cfg.horizon = *horizon;
        if (seed) cfg.seed = *seed;
        return run_to_dict(run_experiment(cfg));
      },
      py::arg("name"), py::arg("horizon") = std::nullopt, py::arg("seed") = std::nullopt,
      "Runs a shipped configuration (optionally overriding horizon/seed) and "
      "returns the summary, final profile, and headline series.");

  m.def(
      "run_config_text",
      [](const std::string& text) {
        return run_to_dict(run_experiment(build_config(parse_ini_text(text, "<python>"))));
      },
      py::arg("text"),
      "Parses an INI configuration from a string, runs it, and returns the "
      "summary, final profile, and headline series.");
}
