#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lrgk/types.hpp"

namespace lrgk {

// Deterministic RNG. mt19937_64 has a standard-pinned output sequence; the
// distribution transforms live here because std::uniform_*/std::normal_*
// are implementation-defined and would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(u64 seed) : eng_(seed) {}

  u64 next_u64() { return eng_(); }

  // Unbiased integer in [0, n) by rejection.
  u64 below(u64 n) {
    if (n == 0) return 0;
    const u64 limit = UINT64_MAX - UINT64_MAX % n;
    u64 x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Marsaglia polar method; spare cached for the next call.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

  // Fisher-Yates.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (u64 i = v.size(); i > 1; --i) {
      const u64 j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values from [0, n), in draw order.
  std::vector<u64> sample_without_replacement(u64 n, u64 k) {
    if (k > n) k = n;
    std::vector<u64> pool(n);
    for (u64 i = 0; i < n; ++i) pool[i] = i;
    std::vector<u64> out;
    out.reserve(k);
    for (u64 i = 0; i < k; ++i) {
      const u64 j = i + below(n - i);
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 finisher over (a, b); derives independent deterministic
// sub-seeds from a master seed.
inline u64 seed_mix(u64 a, u64 b) {
  u64 z = a + 0x9E3779B97F4A7C15ull * (b + 1);
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace lrgk
