#include "tpc/bigint.hpp"

#include <limits>

#include "tpc/errors.hpp"

namespace tpc {

Bytes magnitude_bytes(const BigInt& v) {
  if (v < 0) throw InvalidArgument("negative integers have no wire encoding");
  Bytes out(byte_length(v));
  if (!out.empty()) {
    std::size_t written = 0;
    mpz_export(out.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
  }
  return out;
}

BigInt from_magnitude(ByteView bytes) {
  BigInt out;
  if (!bytes.empty()) mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return out;
}

Bytes fixed_width_bytes(const BigInt& v, std::size_t width) {
  Bytes mag = magnitude_bytes(v);
  if (mag.size() > width) throw InvalidArgument("integer does not fit in the requested width");
  Bytes out(width - mag.size(), 0);
  out.insert(out.end(), mag.begin(), mag.end());
  return out;
}

void write_int(ByteWriter& w, const BigInt& v) {
  Bytes mag = magnitude_bytes(v);
  if (mag.size() > std::numeric_limits<std::uint16_t>::max()) throw InvalidArgument("integer too large to encode");
  w.u16(static_cast<std::uint16_t>(mag.size()));
  w.raw(mag);
}

BigInt read_int(ByteReader& r) {
  std::uint16_t len = r.u16();
  ByteView mag = r.raw(len);
  if (!mag.empty() && mag[0] == 0) throw FramingError("non-minimal integer encoding");
  return from_magnitude(mag);
}

}  // namespace tpc
