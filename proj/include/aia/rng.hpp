#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace aia {

using Rng = std::mt19937_64;

// All randomness in a run flows from one master seed through these mixers,
// so every stream (measurement noise, per-robot planner draws, placement
// generators) is reproducible independently of the others.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return splitmix64(h ^ c);
}

// Uniform in [0,1), 53-bit resolution.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_range(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [0, n). n must be positive.
inline int uniform_index(Rng& rng, int n) {
  int k = static_cast<int>(uniform01(rng) * static_cast<double>(n));
  return k < n ? k : n - 1;
}

// Standard normal via Box-Muller. Stateless: consumes exactly two draws.
inline double gaussian(Rng& rng) {
  double u1 = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;  // (0,1]
  double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

}  // namespace aia
