#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace betreg {

// SplitMix64 step; used to decorrelate user-facing seeds before they reach
// the engine. Fully specified, so seed -> stream is stable across platforms.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for replication r (0-based) derived from a base seed. Replications use
// disjoint streams: base XOR (r+1), scrambled once more at engine init.
inline std::uint64_t replication_seed(std::uint64_t base, std::size_t replication) {
  return base ^ static_cast<std::uint64_t>(replication + 1);
}

// mt19937_64 behind helpers that avoid std::*_distribution, whose outputs are
// not pinned by the standard. Doubles come from the top 53 bits, so the same
// seed yields byte-identical draws on every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform index in [0, n); n >= 1
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  // +1 or -1 with equal probability
  double sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  // standard normal via Box-Muller on the stable uniforms
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace betreg
