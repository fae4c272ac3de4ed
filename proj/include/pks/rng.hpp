#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace pks {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of replica `index` under `master`. Counter based: the i-th stream is a
/// pure function of (master, i), so replicas can run in any order or thread.
constexpr std::uint64_t replica_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ (0xd1b54a32d192ed03ULL * (index + 1)));
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Exponential waiting time; +inf when the rate is not positive.
inline double exponential(Rng& rng, double rate) {
  if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
  return -std::log1p(-uniform01(rng)) / rate;
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace pks
