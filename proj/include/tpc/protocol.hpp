#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpc/bigint.hpp"
#include "tpc/bitstring.hpp"
#include "tpc/bytes.hpp"
#include "tpc/errors.hpp"
#include "tpc/numtheory.hpp"
#include "tpc/random.hpp"
#include "tpc/session.hpp"

/// Pieces shared by the concrete protocol state machines.
namespace tpc::protocol {

using session::Message;
using session::ProtocolInfo;
using session::Transcript;

/// Public values recorded alongside a transcript (key, value).
using PublicParams = std::vector<std::pair<std::string, std::string>>;

inline Message make_message(std::uint8_t tag, ByteWriter&& w) { return Message{tag, std::move(w).take()}; }

/// Throws VerificationError(what) unless cond holds.
inline void require(bool cond, const std::string& what) {
  if (!cond) throw VerificationError(what);
}

/// Base for state machines: owns the party's randomness and completion flag.
class Party : public session::PartyMachine {
 public:
  bool finished() const override { return finished_; }

 protected:
  explicit Party(RandomStream rng) : rng_(std::move(rng)) {}

  RandomStream rng_;
  bool finished_ = false;
};

/// Reader over a payload that must be consumed exactly.
class Payload {
 public:
  Payload(const Message& m, std::string what) : r_(m.payload), what_(std::move(what)) {}
  ByteReader& operator*() { return r_; }
  ByteReader* operator->() { return &r_; }
  void done() const { r_.expect_done(what_); }

 private:
  ByteReader r_;
  std::string what_;
};

/// p, g, then a 1-byte count of the prime factors of p-1 and the factors.
void write_field(ByteWriter& w, const numtheory::FieldContext& f);
/// Throws VerificationError when the generator certificate fails.
numtheory::FieldContext read_field(ByteReader& r);

/// Public element of Z_p* with no known discrete log: SHA-256 of a fixed
/// label, the prime and a counter, reduced mod p, first value in [2, p-1].
BigInt hash_to_element(std::string_view label, const BigInt& p);

/// Rank of a permutation in lexicographic order (Lehmer code) and back.
BigInt permutation_rank(const std::vector<std::uint32_t>& mapping);
std::vector<std::uint32_t> permutation_unrank(BigInt rank, std::size_t n);
/// Bits needed for ranks of permutations of n items: ceil(log2 n!).
std::size_t rank_bits(std::size_t n);

/// Walks a recorded transcript in protocol order for offline verification.
class TranscriptCursor {
 public:
  TranscriptCursor(const Transcript& t, const ProtocolInfo& p) : t_(t), p_(p) {}

  /// Consumes the next entry, which must carry `tag` with the catalogued
  /// direction and step label. Throws FramingError otherwise or at the end.
  ByteReader next(std::uint8_t tag);
  const Message& current() const { return t_[pos_ - 1].message; }
  std::optional<std::uint8_t> peek_tag() const;
  bool at_end() const { return pos_ >= t_.size(); }
  /// Throws FramingError when entries remain.
  void finish() const;
  /// "step i (Label)" for the entry consumed last.
  std::string where() const;

 private:
  const Transcript& t_;
  const ProtocolInfo& p_;
  std::size_t pos_ = 0;
  std::string pending_;
};

/// Runs `fn` on a cursor and requires the whole transcript to be consumed.
/// Errors are rethrown with the step prefixed; anything other than a
/// framing problem is reported as VerificationError.
void verify_with_cursor(const Transcript& t, const ProtocolInfo& p, const std::function<void(TranscriptCursor&)>& fn);

const std::string* find_param(const PublicParams& params, std::string_view key);

}  // namespace tpc::protocol
