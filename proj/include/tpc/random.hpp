#pragma once

#include <cstdint>
#include <random>

#include "tpc/bigint.hpp"

namespace tpc {

/// Seedable randomness stream. Every random choice in the library is drawn
/// from an explicitly injected stream; there is no ambient entropy.
///
/// Sampling uses only the raw 64-bit engine output plus rejection, so
/// results are identical across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  bool bit() { return (engine_() >> 63) != 0; }

  /// Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [0, bound). bound must be positive.
  BigInt below(const BigInt& bound);
  /// Uniform in [lo, hi] inclusive.
  BigInt between(const BigInt& lo, const BigInt& hi);
  /// Uniform integer with exactly `bits` random bits (value < 2^bits).
  BigInt bits(std::size_t bits);
  /// Uniform value in [0,1) with 53 bits of precision.
  double unit();

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

/// SplitMix64 finalizer; used to derive independent per-trial seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace tpc
