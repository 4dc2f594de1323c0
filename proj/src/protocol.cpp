#include "tpc/protocol.hpp"

#include <algorithm>

#include "tpc/digest.hpp"

namespace tpc::protocol {

void write_field(ByteWriter& w, const numtheory::FieldContext& f) {
  write_int(w, f.p());
  write_int(w, f.g());
  w.u8(static_cast<std::uint8_t>(f.order_factors().size()));
  for (const auto& r : f.order_factors()) write_int(w, r);
}

numtheory::FieldContext read_field(ByteReader& r) {
  BigInt p = read_int(r);
  BigInt g = read_int(r);
  std::vector<BigInt> factors(r.u8());
  for (auto& f : factors) f = read_int(r);
  try {
    return numtheory::FieldContext(p, g, std::move(factors));
  } catch (const InvalidArgument& e) {
    throw VerificationError(std::string("field rejected: ") + e.what());
  }
}

BigInt hash_to_element(std::string_view label, const BigInt& p) {
  if (p < 5) throw InvalidArgument("hash_to_element needs p >= 5");
  const Bytes pb = magnitude_bytes(p);
  for (std::uint32_t counter = 0;; ++counter) {
    ByteWriter w;
    w.raw(ByteView(reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
    w.u16(static_cast<std::uint16_t>(pb.size()));
    w.raw(pb);
    w.u32(counter);
    const auto d = sha256(w.bytes());
    BigInt c = mod(from_magnitude(d), p);
    if (c >= 2) return c;
  }
}

BigInt permutation_rank(const std::vector<std::uint32_t>& mapping) {
  const std::size_t n = mapping.size();
  BigInt rank = 0;
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t smaller = 0;
    for (std::uint32_t v = 0; v < mapping[i]; ++v)
      if (!used[v]) ++smaller;
    used[mapping[i]] = true;
    rank = rank * static_cast<unsigned long>(n - i) + static_cast<unsigned long>(smaller);
  }
  return rank;
}

std::vector<std::uint32_t> permutation_unrank(BigInt rank, std::size_t n) {
  std::vector<BigInt> digits(n);
  for (std::size_t i = n; i-- > 0;) {
    const unsigned long base = static_cast<unsigned long>(n - i);
    digits[i] = mod(rank, BigInt(base));
    rank /= base;
  }
  if (rank != 0) throw InvalidArgument("permutation rank out of range");
  std::vector<std::uint32_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);
  std::vector<std::uint32_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = to_u64(digits[i]);
    out.push_back(pool[d]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return out;
}

std::size_t rank_bits(std::size_t n) {
  BigInt f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<unsigned long>(i);
  return bit_length(BigInt(f - 1));
}

ByteReader TranscriptCursor::next(std::uint8_t tag) {
  const session::TagInfo* want = p_.tags.find(tag);
  const std::string name = want ? want->name : "message";
  if (at_end()) {
    pending_ = "step " + std::to_string(pos_) + " (missing " + name + ")";
    throw FramingError("transcript ends before the expected " + name);
  }
  const auto& e = t_[pos_++];
  pending_.clear();
  if (e.message.tag != tag) throw FramingError("expected " + name + ", found a different message");
  if (!want || e.direction != want->direction || e.step_label != want->step_label)
    throw FramingError(name + " has the wrong direction or step label");
  return ByteReader(e.message.payload);
}

std::optional<std::uint8_t> TranscriptCursor::peek_tag() const {
  if (at_end()) return std::nullopt;
  return t_[pos_].message.tag;
}

void TranscriptCursor::finish() const {
  if (!at_end()) throw FramingError("unexpected messages after the end of the protocol flow");
}

std::string TranscriptCursor::where() const {
  if (!pending_.empty()) return pending_;
  if (pos_ == 0) return "step 0 (start)";
  return "step " + std::to_string(pos_ - 1) + " (" + t_[pos_ - 1].step_label + ")";
}

void verify_with_cursor(const Transcript& t, const ProtocolInfo& p, const std::function<void(TranscriptCursor&)>& fn) {
  TranscriptCursor c(t, p);
  try {
    fn(c);
    c.finish();
  } catch (const FramingError& e) {
    throw FramingError(c.where() + ": " + e.what());
  } catch (const Error& e) {
    throw VerificationError(c.where() + ": " + e.what());
  }
}

const std::string* find_param(const PublicParams& params, std::string_view key) {
  for (const auto& [k, v] : params)
    if (k == key) return &v;
  return nullptr;
}

}  // namespace tpc::protocol
