#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tpc {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Lowercase hex, two characters per byte.
std::string to_hex(ByteView bytes);

/// Strict inverse of to_hex: even length, lowercase [0-9a-f] only.
/// Throws FramingError otherwise.
Bytes from_hex(std::string_view hex);

/// Append-only big-endian writer.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void raw(ByteView bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }

  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

/// Bounds-checked big-endian reader. Every read past the end throws FramingError.
class ByteReader {
 public:
  explicit ByteReader(ByteView bytes) : data_(bytes) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  ByteView raw(std::size_t n);

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return remaining() == 0; }
  /// Throws FramingError naming `what` when unread bytes are left.
  void expect_done(std::string_view what) const;

 private:
  void need(std::size_t n) const;

  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace tpc
