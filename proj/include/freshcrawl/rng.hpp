#pragma once

#include <cmath>
#include <cstdint>

namespace freshcrawl {

// splitmix64: used both as a stream seeder and as the core generator.
// Self-contained so that seeded runs are reproducible across platforms
// (std::distributions are implementation-defined).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // decorrelate trivially related seeds
    splitmix64(state_);
  }

  // Independent substream, e.g. per (user, day).
  Rng fork(std::uint64_t a, std::uint64_t b = 0) const {
    std::uint64_t s = state_ ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xc2b2ae3d27d4eb4fULL);
    return Rng(s);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  double next_double() {  // uniform in [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Knuth for small means, normal approximation for large ones.
  long poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 60.0) {
      const double limit = std::exp(-mean);
      long k = 0;
      double p = 1.0;
      do {
        p *= next_double();
        ++k;
      } while (p > limit);
      return k - 1;
    }
    const double g = gaussian();
    const long k = static_cast<long>(std::lround(mean + std::sqrt(mean) * g));
    return k < 0 ? 0 : k;
  }

  double gaussian() {  // Box-Muller, one value per call
    double u1 = next_double();
    while (u1 <= 1e-300) u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace freshcrawl
