#ifndef KICKCAST_RNG_HPP
#define KICKCAST_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "kickcast/error.hpp"

namespace kickcast {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ seeded via splitmix64. Streams derived from (seed, path...)
// are independent of scheduling, so parallel runs stay reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  // Counter-based stream: hash the seed with a path of indices
  // (e.g. {run}, {tree, feature}) and seed a fresh generator from it.
  static Rng derive(uint64_t seed, std::initializer_list<uint64_t> path) {
    uint64_t h = seed ^ 0xd6e8feb86659fd93ULL;
    for (uint64_t id : path) {
      h ^= id + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      uint64_t t = h;
      h = splitmix64(t);
    }
    return Rng(h);
  }

  uint64_t next() {
    uint64_t* s = s_;
    uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  uint64_t uniform_int(uint64_t n) {
    // Rejection sampling on the top bits keeps the draw unbiased.
    uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Poisson draw by inversion of the product of uniforms; exact for the
  // intensity range used here. Large intensities are split additively to
  // keep exp(-lambda) away from underflow.
  int poisson(double lambda) {
    if (!(lambda > 0)) {
      if (lambda == 0) return 0;
      throw input_error("poisson: intensity must be non-negative");
    }
    int total = 0;
    while (lambda > 60.0) {
      total += poisson_small(60.0);
      lambda -= 60.0;
    }
    return total + poisson_small(lambda);
  }

  // Standard normal via the polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  int poisson_small(double lambda) {
    double limit = std::exp(-lambda);
    double prod = uniform();
    int k = 0;
    while (prod > limit) {
      prod *= uniform();
      ++k;
    }
    return k;
  }

  uint64_t s_[4];
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace kickcast

#endif
