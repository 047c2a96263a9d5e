#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace liqsurf::rng {

// All sampling in the project goes through these transforms rather than
// std::*_distribution, whose output sequences are implementation-defined.
// mt19937_64 itself is pinned by the standard, so seeded runs are
// bit-reproducible across platforms and toolchains.

using Engine = std::mt19937_64;

// splitmix64 step, used to derive independent per-path / per-restart seeds
// from a master seed without overlapping streams.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform on (0,1): 53-bit mantissa, never exactly 0 or 1.
inline double uniform01(Engine& eng) {
  const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return u > 0.0 ? u : 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

// Standard normal via the polar (Marsaglia) method. One value per call; the
// spare is discarded so the draw count per variate is data-independent only
// in distribution, which is fine for reproducibility (the engine state fully
// determines the sequence).
inline double normal(Engine& eng) {
  while (true) {
    const double u = 2.0 * uniform01(eng) - 1.0;
    const double v = 2.0 * uniform01(eng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

// Marsaglia-Tsang for shape >= 1, boosted for shape < 1. Unit scale.
inline double gamma(Engine& eng, double shape) {
  if (shape < 1.0) {
    const double u = uniform01(eng);
    return gamma(eng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = normal(eng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform01(eng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double chi_squared(Engine& eng, double dof) {
  return 2.0 * gamma(eng, 0.5 * dof);
}

}  // namespace liqsurf::rng
