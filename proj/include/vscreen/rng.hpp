#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace vscreen {

/// Seeded 64-bit Mersenne Twister with platform-independent conversions.
///
/// The standard distributions are implementation-defined, so uniform and
/// Bernoulli draws are derived directly from the raw engine output. Two
/// generators built from the same (seed, stream) pair produce identical
/// sequences on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  std::uint64_t next() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Seed for repeat `i` of a run started from `base`.
constexpr std::uint64_t repeat_seed(std::uint64_t base, std::uint64_t i) { return base ^ i; }

}  // namespace vscreen
