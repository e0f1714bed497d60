#pragma once

#include <cstdint>

namespace mrh {

// SplitMix64. Every seeded generator in this project (corpus synthesis,
// query synthesis, test fuzzers) draws from this so that identical seeds
// reproduce identical streams on any platform. The exact constants are
// documented in the README; changing them changes every synthetic corpus.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + unit() * (hi - lo); }

  // Uniform integer in [0, n). n must be positive; modulo bias is irrelevant
  // at the scales used here.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace mrh
