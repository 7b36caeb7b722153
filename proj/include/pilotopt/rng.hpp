#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace pilotopt {

// splitmix64 mixing step, used for seed derivation only.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Splitting rule for independent streams. All randomness flows from explicit
// 64-bit seeds; a routine that needs several independent streams (one per
// Monte-Carlo block, one per purpose inside a block, ...) derives them as
// splitmix64(base ^ splitmix64(stream + C)). Nested derivation is fine.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Seeded RNG. The engine is std::mt19937_64, whose raw output is pinned by
// the standard; the distribution transforms are implemented here instead of
// using std:: distributions so that sequences are identical across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  static Rng derived(std::uint64_t base, std::uint64_t stream) {
    return Rng(derive_seed(base, stream));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [lo, hi] inclusive; rejection sampling, no modulo bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t n = static_cast<std::uint64_t>(hi - lo) + 1;
    if (n == 0) return static_cast<std::int64_t>(eng_());
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t bound = max - max % n;  // multiple of n
    std::uint64_t v = eng_();
    while (v >= bound) v = eng_();
    return lo + static_cast<std::int64_t>(v % n);
  }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly symmetric complex Gaussian, `var_per_dim` per real dimension.
  std::complex<double> complex_normal(double var_per_dim) {
    const double s = std::sqrt(var_per_dim);
    const double re = s * normal();
    const double im = s * normal();
    return {re, im};
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pilotopt
