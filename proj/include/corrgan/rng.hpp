#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace corrgan {

// Every random draw in the project flows from one root seed, fanned out into
// labeled substreams so that independent components (corruption, init,
// shuffling, ...) never share a stream. The generator is splitmix64: tiny,
// portable, and trivially reproducible outside C++ (the python reference
// scripts use the same mixing constants).

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Stable key for the substream `label[index]` of `seed`.
inline std::uint64_t stream_key(std::uint64_t seed, std::string_view label,
                                std::uint64_t index = 0) {
  std::uint64_t k = mix64(seed ^ fnv1a64(label));
  return mix64(k ^ (index * kGolden));
}

class Splitmix64 {
 public:
  explicit Splitmix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += kGolden);
    return mix64(z);
  }

  // Uniform in [0, 1) with 53 bits of entropy.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [-1, 1).
  double next_symmetric() { return 2.0 * next_double() - 1.0; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // Box-Muller; deterministic and portable, unlike std::normal_distribution.
  double next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace corrgan
