#include "tpc/bitstring.hpp"

#include "tpc/errors.hpp"

namespace tpc {

BitString::BitString(std::size_t bits) : bits_(bits), data_((bits + 7) / 8, 0) {
  if (bits > 0xffff) throw InvalidArgument("bit string too long");
}

BitString BitString::parse(std::string_view text) {
  BitString out(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1') throw InvalidArgument("bit string must contain only '0' and '1'");
    out.set_bit(i, text[i] == '1');
  }
  return out;
}

BitString BitString::low_bits(const BigInt& value, std::size_t bits) {
  BitString out(bits);
  BigInt masked;
  mpz_fdiv_r_2exp(masked.get_mpz_t(), value.get_mpz_t(), bits);
  Bytes mag = magnitude_bytes(masked);
  std::copy(mag.begin(), mag.end(), out.data_.end() - static_cast<std::ptrdiff_t>(mag.size()));
  return out;
}

BitString BitString::random(std::size_t bits, RandomStream& rng) { return low_bits(rng.bits(bits), bits); }

// Position i (from the left) lives at value bit (bits_ - 1 - i).
bool BitString::bit(std::size_t i) const {
  if (i >= bits_) throw InvalidArgument("bit index out of range");
  const std::size_t vbit = bits_ - 1 - i;
  return (data_[data_.size() - 1 - vbit / 8] >> (vbit % 8)) & 1u;
}

void BitString::set_bit(std::size_t i, bool v) {
  if (i >= bits_) throw InvalidArgument("bit index out of range");
  const std::size_t vbit = bits_ - 1 - i;
  std::uint8_t& byte = data_[data_.size() - 1 - vbit / 8];
  const std::uint8_t mask = static_cast<std::uint8_t>(1u << (vbit % 8));
  byte = v ? static_cast<std::uint8_t>(byte | mask) : static_cast<std::uint8_t>(byte & ~mask);
}

BigInt BitString::to_integer() const { return from_magnitude(data_); }

std::string BitString::to_string() const {
  std::string out(bits_, '0');
  for (std::size_t i = 0; i < bits_; ++i)
    if (bit(i)) out[i] = '1';
  return out;
}

BitString BitString::operator^(const BitString& other) const {
  BitString out = *this;
  out ^= other;
  return out;
}

BitString& BitString::operator^=(const BitString& other) {
  if (bits_ != other.bits_) throw InvalidArgument("bit string lengths differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] ^= other.data_[i];
  return *this;
}

void write_bits(ByteWriter& w, const BitString& s) {
  w.u16(static_cast<std::uint16_t>(s.size()));
  w.raw(s.bytes());
}

BitString read_bits(ByteReader& r) {
  const std::size_t bits = r.u16();
  ByteView raw = r.raw((bits + 7) / 8);
  if (bits % 8 != 0 && (raw[0] >> (bits % 8)) != 0) throw FramingError("bit string has nonzero padding");
  return BitString::low_bits(from_magnitude(raw), bits);
}

}  // namespace tpc
