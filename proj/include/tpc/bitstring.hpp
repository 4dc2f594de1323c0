#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "tpc/bigint.hpp"
#include "tpc/bytes.hpp"
#include "tpc/random.hpp"

namespace tpc {

/// Fixed-length bit string. Stored as a right-aligned big-endian integer in
/// ceil(size/8) bytes; unused high bits are always zero. Bit 0 is the most
/// significant (leftmost) bit.
class BitString {
 public:
  BitString() = default;
  /// All-zero string of `bits` bits.
  explicit BitString(std::size_t bits);

  /// Parses '0'/'1' characters, leftmost first. Throws InvalidArgument.
  static BitString parse(std::string_view text);
  /// Low `bits` bits of a nonnegative integer.
  static BitString low_bits(const BigInt& value, std::size_t bits);
  static BitString random(std::size_t bits, RandomStream& rng);

  std::size_t size() const { return bits_; }
  bool bit(std::size_t i) const;
  void set_bit(std::size_t i, bool v);
  BigInt to_integer() const;
  std::string to_string() const;
  const Bytes& bytes() const { return data_; }

  /// Bitwise XOR; sizes must match.
  BitString operator^(const BitString& other) const;
  BitString& operator^=(const BitString& other);

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::size_t bits_ = 0;
  Bytes data_;
};

/// 2-byte bit count then the stored bytes.
void write_bits(ByteWriter& w, const BitString& s);
BitString read_bits(ByteReader& r);

}  // namespace tpc
