#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace renewalctl {

// Seeded 64-bit generator with its distribution transforms written out, so a
// given seed reproduces the same stream everywhere. std::mt19937_64 has a
// standardized bit stream; the standard <random> distribution objects do not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Exponential with the given mean; non-positive mean degenerates to 0.
  double exponential(double mean) {
    if (mean <= 0.0) return 0.0;
    return -mean * std::log1p(-uniform01());
  }

  // Sum of n Bernoulli(p) trials. Frames here span a few dozen slots, so the
  // direct loop is exact and fast enough.
  long binomial(long n, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    long count = 0;
    for (long i = 0; i < n; ++i) count += bernoulli(p) ? 1 : 0;
    return count;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace renewalctl
