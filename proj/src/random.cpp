#include "tpc/random.hpp"

#include "tpc/errors.hpp"

namespace tpc {

std::uint64_t RandomStream::below(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("below: bound must be positive");
  // Largest multiple of bound that fits, to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x > limit);
  return x % bound;
}

BigInt RandomStream::bits(std::size_t nbits) {
  BigInt out = 0;
  std::size_t full = nbits / 64;
  for (std::size_t i = 0; i < full; ++i) {
    out <<= 64;
    out += from_u64(engine_());
  }
  std::size_t rest = nbits % 64;
  if (rest != 0) {
    out <<= rest;
    out += from_u64(engine_() >> (64 - rest));
  }
  return out;
}

BigInt RandomStream::below(const BigInt& bound) {
  if (bound <= 0) throw InvalidArgument("below: bound must be positive");
  if (bound == 1) return 0;
  const std::size_t nbits = bit_length(bound - 1);
  BigInt x;
  do {
    x = bits(nbits);
  } while (x >= bound);
  return x;
}

BigInt RandomStream::between(const BigInt& lo, const BigInt& hi) {
  if (hi < lo) throw InvalidArgument("between: empty range");
  return lo + below(BigInt(hi - lo + 1));
}

double RandomStream::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

}  // namespace tpc
