#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace eprsim {

/// splitmix64 output function (Vigna). Used both as a standalone mixer for
/// deriving substream keys and as the seeding sequence for Xoshiro256pp.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ generator, seeded through splitmix64 per the reference
/// recipe. Small, fast, and entirely deterministic across platforms.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in (0, 1]; never returns 0 so log() is safe.
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  /// One pair of independent standard normals (Box-Muller).
  void normal_pair(double& z0, double& z1) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(ang);
    z1 = r * std::sin(ang);
  }

  double normal() {
    double z0, z1;
    normal_pair(z0, z1);
    return z0;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

/// Key for the substream `index` of a master seed. Streams derived for
/// distinct indices are statistically independent, and the derivation is a
/// pure function of (seed, index) so work can be distributed across threads
/// in any order without changing the draws.
inline std::uint64_t substream_key(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ 0xD1B54A32D192ED03ULL;
  std::uint64_t a = splitmix64_next(s);
  s = a ^ index;
  return splitmix64_next(s);
}

inline Xoshiro256pp substream(std::uint64_t seed, std::uint64_t index) {
  return Xoshiro256pp(substream_key(seed, index));
}

}  // namespace eprsim
