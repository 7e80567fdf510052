#pragma once

// Seeded random streams. Each Monte Carlo sample owns a stream derived from
// (seed, sample, attempt), so results do not depend on scheduling.

#include <cmath>
#include <cstdint>
#include <random>

#include "entlab/core.hpp"

namespace entlab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t attempt = 0)
      : engine_(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ attempt)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double angle() { return two_pi * uniform(); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace entlab
