// Shared basic types: error hierarchy, small vector helpers, deterministic RNG
// helpers, and number formatting used by the CSV emitters.
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace drone {

using Vec = std::vector<double>;

// Raised for malformed user input (config files, CLI arguments, data files).
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a runtime invariant is violated (divergence guards, feasibility
// checks, dimension mismatches discovered mid-run). CLI exit code 1.
struct InvariantError : std::runtime_error {
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

// ----- small dense-vector helpers (kept free-standing on std::vector) -----

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);            // Euclidean norm
double norm1(const Vec& a);            // sum of absolute values
double norm_inf(const Vec& a);         // max absolute value
double dist2(const Vec& a, const Vec& b);
double dist_inf(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, double c);
// a + c*b
Vec axpy(const Vec& a, double c, const Vec& b);

void require(bool cond, const std::string& message);          // InvariantError
void require_config(bool cond, const std::string& message);   // ConfigError

// ----- deterministic randomness -----
//
// All stochastic behaviour in the project flows through these helpers so that
// a fixed seed yields byte-identical runs across platforms. The engine is
// std::mt19937_64 with explicit uniform conversion (std::uniform_real_
// distribution is not guaranteed to be reproducible across standard
// libraries, so we convert ourselves).

using Rng = std::mt19937_64;

// Uniform double in [0, 1) using the top 53 bits of the engine output.
double uniform01(Rng& rng);
// Uniform double in [lo, hi).
double uniform(Rng& rng, double lo, double hi);
// Uniform integer in {0, ..., n-1}; uses rejection sampling for exactness.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);
// Derive a child seed from a base seed and a stream index (splitmix64 mixing)
// so parallel or per-agent streams are decorrelated but reproducible.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// ----- formatting -----

// Fixed round-trippable formatting used for all CSV output: %.12g.
std::string format_double(double value);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

}  // namespace drone
