#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace agent {

// splitmix64 finalizer; turns arbitrary 64-bit values into well mixed seeds.
inline std::uint64_t mix_bits(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic sub-stream seeds, e.g. derive_seed(run_seed, generation, index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix_bits(base ^ 0xa0761d6478bd642full);
  s = mix_bits(s ^ a);
  s = mix_bits(s ^ b);
  s = mix_bits(s ^ c);
  return s;
}

// Seeded random stream. The engine is std::mt19937_64 (bit-exact by the
// standard); the distributions are implemented here rather than taken from
// <random> because the standard leaves those implementation-defined and runs
// must replay bit-identically everywhere.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // Uniform integer in [0, n); unbiased via rejection.
  int uniform_int(int n) {
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = (~0ull / un) * un;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<int>(x % un);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller, no caching so draw counts stay predictable.
  double normal(double mean, double sd) {
    static constexpr double kTwoPi = 6.283185307179586476925286766559;
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // Knuth's product-of-uniforms sampler; fine for the small means used here.
  int poisson(double mean) {
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  RngStream split(std::uint64_t a, std::uint64_t b = 0) {
    return RngStream(derive_seed(next_u64(), a, b));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace agent
