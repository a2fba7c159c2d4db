#pragma once

#include <cstdint>
#include <random>

namespace tcbirrt {

/// mt19937_64 with a platform-independent uniform double mapping, so seeded
/// runs reproduce bit-for-bit everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double canonical() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }

  /// Uniform integer in [0, n).
  int uniform_int(int n) { return static_cast<int>(canonical() * n); }

  std::uint64_t next() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tcbirrt
