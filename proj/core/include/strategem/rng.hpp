#pragma once

#include <cmath>
#include <cstdint>

namespace strategem {

// Deterministic random number generation for simulation runs.
//
// The generator is part of the external contract: traces produced with the
// same seed must be reproducible by an independent implementation. We use
// xoshiro256++ (Blackman & Vigna), with state initialised by four successive
// outputs of splitmix64. Substreams are derived by folding stream labels into
// the splitmix64 seed (see substream()). Gaussians come from the Box-Muller
// transform, consuming exactly two 53-bit uniforms per call and returning the
// cosine branch.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next() {
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

  // Uniform double in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes two uniforms.
  double gaussian() {
    double u1 = uniform01();
    double u2 = uniform01();
    // Guard against log(0).
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Independent substream for (seed, a, b, c), e.g. (run seed, epoch, purpose).
inline Xoshiro256pp substream(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t sm = seed;
  std::uint64_t mix = splitmix64(sm);
  sm = mix ^ (a * 0x9E3779B97F4A7C15ULL);
  mix = splitmix64(sm);
  sm = mix ^ (b * 0xC2B2AE3D27D4EB4FULL);
  mix = splitmix64(sm);
  sm = mix ^ (c * 0x165667B19E3779F9ULL);
  return Xoshiro256pp(splitmix64(sm));
}

}  // namespace strategem
