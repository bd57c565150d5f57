#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <vector>

namespace survmidas {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Linear-interpolation (type-7) empirical quantile, p in [0,1].
double quantile7(std::vector<double> v, double p);

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = splitmix64(seed);
  for (auto c : coords) h = splitmix64(h ^ splitmix64(c));
  return h;
}

// Independent RNG stream for the task identified by (seed, coords).
// Results are independent of scheduling order as long as every task
// derives its stream from its own coordinates.
inline std::mt19937_64 rng_stream(std::uint64_t seed,
                                  std::initializer_list<std::uint64_t> coords) {
  return std::mt19937_64(derive_seed(seed, coords));
}

inline double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// log(1 + exp(z)) without overflow for large z
inline double log1pexp(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace survmidas
