// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0
//
// Stateless, counter-keyed random numbers. Every draw is a pure function of
// its key, so values do not depend on evaluation order or thread layout.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace ndi {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_key(std::uint64_t seed, std::uint64_t a) { return mix64(seed ^ mix64(a)); }

template <typename... Rest>
constexpr std::uint64_t hash_key(std::uint64_t seed, std::uint64_t a, Rest... rest) {
  return hash_key(hash_key(seed, a), static_cast<std::uint64_t>(rest)...);
}

// Uniform in [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Two independent standard normals (Box-Muller) from one 64-bit key.
inline std::pair<double, double> normal_pair(std::uint64_t key) {
  const double u1 = 1.0 - to_unit(mix64(key));  // (0, 1]
  const double u2 = to_unit(mix64(key ^ 0xD1B54A32D192ED03ull));
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

// Sequential generator for small bookkeeping draws (presets, shuffles).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double uniform() { return to_unit(next()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;
    for (;;) {
      const std::uint64_t v = next();
      if (v >= limit) return v % bound;
    }
  }

  // Integer in [lo, hi].
  int range(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace ndi
