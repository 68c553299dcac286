#pragma once

#include <array>
#include <cstdint>

namespace segerr {

// xoshiro256** seeded through splitmix64. Chosen over std::mt19937 because the
// output stream is fixed by the algorithm alone, so scenes regenerate
// bit-identically across compilers and languages. See FORMATS.md.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased integer in [0, n) via mask rejection; n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t mask = mask_for(n - 1);
    std::uint64_t x;
    do {
      x = next_u64() & mask;
    } while (x >= n);
    return x;
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // One-shot mix of a key; used for per-point decisions that must stay a pure
  // function of (key, seed).
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t key) {
    std::uint64_t x = seed ^ (key * 0xD1B54A32D192ED03ULL);
    return splitmix64(x);
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }
  static std::uint64_t mask_for(std::uint64_t v) {
    std::uint64_t m = v;
    m |= m >> 1;
    m |= m >> 2;
    m |= m >> 4;
    m |= m >> 8;
    m |= m >> 16;
    m |= m >> 32;
    return m;
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace segerr
