#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

#include "lrmc/types.hpp"

namespace lrmc {

// All sampling in the library goes through these helpers.  std::mt19937_64 has
// a standard-mandated output sequence, and the transforms below avoid the
// std::*_distribution classes whose output is implementation defined, so every
// draw is reproducible from the seed alone on any platform.
using Rng = std::mt19937_64;

// Splitmix64 step, used to derive independent streams from (seed, tag) pairs.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Exp(1) draw; log argument is in (0, 1] so the result is always finite.
inline double exponential_draw(Rng& rng) {
  return -std::log(1.0 - uniform01(rng));
}

// Flat Dirichlet over k categories: normalized vector of Exp(1) draws.
inline Vector dirichlet_flat(Rng& rng, Index k) {
  if (k < 1) throw std::invalid_argument("dirichlet_flat: k must be positive");
  Vector v(k);
  for (Index i = 0; i < k; ++i) v[i] = exponential_draw(rng);
  double total = v.sum();
  if (total <= 0.0) return Vector::Constant(k, 1.0 / static_cast<double>(k));
  return v / total;
}

// Unbiased integer draw from {0, ..., n-1} by rejection.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
  const std::uint64_t limit =
      (std::numeric_limits<std::uint64_t>::max() / n) * n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// Index draw from the distribution given by `weights` (nonnegative, summing to
// roughly one).  Inverse CDF walk; the final index catches rounding leftovers.
inline Index sample_categorical(Rng& rng, const Vector& weights) {
  const double u = uniform01(rng) * weights.sum();
  double acc = 0.0;
  for (Index i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace lrmc
