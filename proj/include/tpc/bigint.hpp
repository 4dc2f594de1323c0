#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "tpc/bytes.hpp"

namespace tpc {

/// Arbitrary-precision integer. All protocol values are nonnegative.
using BigInt = mpz_class;

/// Big-endian magnitude, minimal length (zero encodes as no bytes).
Bytes magnitude_bytes(const BigInt& v);
BigInt from_magnitude(ByteView bytes);

/// Big-endian magnitude left-padded with zeros to exactly `width` bytes.
/// Throws InvalidArgument when the value does not fit.
Bytes fixed_width_bytes(const BigInt& v, std::size_t width);

/// Wire encoding: 2-byte big-endian length prefix followed by the magnitude.
void write_int(ByteWriter& w, const BigInt& v);
/// Rejects non-minimal encodings (leading zero byte) so every value has one encoding.
BigInt read_int(ByteReader& r);

inline std::size_t bit_length(const BigInt& v) { return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2); }
inline std::size_t byte_length(const BigInt& v) { return (bit_length(v) + 7) / 8; }

/// Low 64 bits of |v|.
inline std::uint64_t to_u64(const BigInt& v) {
  BigInt low;
  mpz_tdiv_r_2exp(low.get_mpz_t(), v.get_mpz_t(), 64);
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, low.get_mpz_t());
  return out;
}
inline BigInt from_u64(std::uint64_t v) {
  BigInt out;
  mpz_import(out.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return out;
}

/// Least nonnegative residue of a mod m.
inline BigInt mod(const BigInt& a, const BigInt& m) {
  BigInt r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline BigInt gcd(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

}  // namespace tpc
