#pragma once

// Seed derivation and portable uniform draws. std::mt19937_64 has a fully
// specified output sequence; the distribution helpers below are written out
// so results do not depend on the standard library vendor.

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace kweak {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return splitmix64(seed ^ splitmix64(value));
}

inline std::uint64_t hash_combine(std::uint64_t seed, double value) {
  return hash_combine(seed, std::bit_cast<std::uint64_t>(value));
}

inline std::uint64_t hash_values(std::uint64_t seed, std::initializer_list<std::uint64_t> values) {
  for (auto v : values) seed = hash_combine(seed, v);
  return seed;
}

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

/// Poisson draw by CDF inversion.
inline int poisson_inversion(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  const double u = uniform01(rng);
  double p = std::exp(-mean);
  double cdf = p;
  int k = 0;
  while (u > cdf && k < 100000) {
    ++k;
    p *= mean / k;
    cdf += p;
    if (p == 0.0) break;
  }
  return k;
}

}  // namespace kweak
