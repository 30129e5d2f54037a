#pragma once

#include <cstdint>

namespace qiopa {

/// SplitMix64 finalizer; the avalanche behind every substream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Minimal PCG32 (XSH-RR). Counter-based seeding keeps every trial's stream
/// independent of execution order, so parallel tallies reproduce exactly.
class Pcg32 {
 public:
  Pcg32(std::uint64_t seed, std::uint64_t stream) : state_(0), inc_((stream << 1) | 1ULL) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18) ^ old) >> 27);
    std::uint32_t rot = static_cast<std::uint32_t>(old >> 59);
    return (xorshifted >> rot) | (xorshifted << ((32 - rot) & 31));
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Bernoulli draw; consumes exactly one uniform.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

/// Documented substream derivation: seed and stream are SplitMix64 chains
/// over (master_seed, block, index). `block` namespaces independent tally
/// groups (0 for a plain run, 1.. for scan points).
inline Pcg32 substream(std::uint64_t master_seed, std::uint64_t block, std::uint64_t index) {
  std::uint64_t a = mix64(master_seed ^ 0x9E3779B97F4A7C15ULL);
  std::uint64_t b = mix64(a + block);
  std::uint64_t c = mix64(b + index);
  return Pcg32(c, mix64(c + 0xDA942042E4DD58B5ULL));
}

}  // namespace qiopa
