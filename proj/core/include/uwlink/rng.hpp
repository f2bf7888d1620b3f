// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

#include "uwlink/common.hpp"

namespace uwlink {

// Deterministic, platform-independent random primitives. All randomness in the
// simulator flows through this generator so that a campaign seed reproduces
// bit-identical results regardless of worker count or standard library.

/// splitmix64 step; also used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Mixes a seed with stream labels (e.g. point index, trial index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s ^= a * 0x9e3779b97f4a7c15ULL + h;
  h = splitmix64(s);
  s ^= b * 0xd1342543de82ef95ULL + h;
  return splitmix64(s);
}

/// xoshiro256** generator (public-domain algorithm by Blackman & Vigna).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) via rejection (no modulo bias).
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  int next_bit() { return static_cast<int>(next_u64() >> 63); }

  /// Standard normal via Box-Muller (cached second deviate).
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2.0 * kPi * u2);
    have_cached_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  /// Circularly-symmetric complex normal with E|x|^2 = 1.
  cd next_cnormal() {
    constexpr double kInvSqrt2 = 0.7071067811865475244;
    return {next_normal() * kInvSqrt2, next_normal() * kInvSqrt2};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace uwlink
