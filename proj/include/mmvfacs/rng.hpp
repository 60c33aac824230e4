#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <cmath>

namespace mmvfacs {

// Deterministic RNG stack, fixed for seed compatibility (see README):
//   - splitmix64 finalizer for seed mixing and sub-stream derivation,
//   - xoshiro256++ (Blackman & Vigna) as the stream generator,
//   - Box-Muller (trigonometric form) for normal variates.
// Changing any of these silently would break every recorded seed.

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

// splitmix64 output finalizer (stateless).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Child seed for sub-stream `stream` of `seed`:
//   child = mix64(seed + kGolden64 * (stream + 1)).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed + kGolden64 * (stream + 1));
}

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t s0, std::uint64_t s1,
                          Rest... rest) {
  return derive_seed(derive_seed(seed, s0), s1, rest...);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    // State expansion via the splitmix64 stream, per the xoshiro reference.
    std::uint64_t sm = seed;
    for (auto& w : state_) {
      sm += kGolden64;
      w = mix64(sm);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) without modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit =
        (std::numeric_limits<std::uint64_t>::max() / bound) * bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  // Standard normal via Box-Muller; generates pairs, caches the second.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    // u1 in (0,1] keeps the log finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  // +1 or -1 with equal probability (top bit of the next word).
  double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace mmvfacs
