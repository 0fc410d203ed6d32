#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace noveldetect {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seeded generator with distribution code that does not depend on the
/// standard library implementation, so outputs are reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - n) % n;  // multiple of n, 0 means 2^64
    for (;;) {
      std::uint64_t x = engine_();
      if (limit == 0 || x < limit) return x % n;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace noveldetect
