#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gmlab {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent substream seed from a master seed and a path of
/// indices, e.g. derive_seed(master, {grid_index, replicate}).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

/// A seeded 64-bit stream. Every substream in the library is one of these,
/// seeded through derive_seed, so work can be split across threads without
/// changing any drawn value.
class Substream {
 public:
  explicit Substream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) built from the top 53 bits of one draw.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gmlab
