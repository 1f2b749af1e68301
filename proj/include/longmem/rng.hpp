// Seedable, splittable random number generation.
//
// Stream discipline: every replication owns an independent xoshiro256++
// generator seeded through substream(master, a, b). The mixing function is
// splitmix64's finalizer, so distinct (a, b) index pairs give decorrelated
// streams and the whole experiment is a pure function of the master seed.
// Variate transforms (Box-Muller, Bailey's polar-t) are written out here so
// sequences depend only on this header, not on the standard library's
// unspecified distribution algorithms.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace longmem {

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derive the seed of substream (a, b) from a master seed.
// Replication r at sample size n uses substream(master, n, r).
inline std::uint64_t substream(std::uint64_t master, std::uint64_t a,
                               std::uint64_t b = 0) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ mix64(a ^ 0xA5A5A5A55A5A5A5AULL));
  s = mix64(s ^ mix64(b ^ 0xC3C3C3C33C3C3C3CULL));
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    // xoshiro256++ state filled from splitmix64 as recommended upstream
    std::uint64_t sm = seed;
    for (auto& w : state_) {
      sm += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      w = z ^ (z >> 31);
    }
    have_spare_ = false;
    spare_ = 0.0;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform on (0, 1), never exactly 0 or 1
  double uniform01() {
    return double(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  // uniform on (-1, 1)
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  // standard normal via Box-Muller; one uniform pair yields two normals
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Student-t with df > 0 via Bailey's polar method; unit scale
  double student_t(double df) {
    for (;;) {
      const double u = uniform_pm1();
      const double v = uniform_pm1();
      const double w = u * u + v * v;
      if (w > 0.0 && w < 1.0)
        return u * std::sqrt(df * (std::pow(w, -2.0 / df) - 1.0) / w);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
  bool have_spare_;
  double spare_;
};

}  // namespace longmem
