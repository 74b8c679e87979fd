#pragma once

// Pinned pseudo-random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the conversions below are written
// out here instead of using <random> distributions, whose algorithms are
// implementation-defined.

#include <cstdint>
#include <random>

namespace hyperlens {

/// SplitMix64 finalizer applied to seed + golden-ratio * (stream + 1).
/// Derives independent per-channel seeds from one user seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via the Box-Muller transform; values are produced in
  /// pairs and the second one is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hyperlens
