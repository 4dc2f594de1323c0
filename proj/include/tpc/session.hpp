#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpc/bytes.hpp"
#include "tpc/random.hpp"

/// Two-party protocol execution: wire framing, transports, the session
/// driver, transcripts and the reusable security predicates.
namespace tpc::session {

enum class Role : std::uint8_t { A = 0, B = 1 };
enum class Direction : std::uint8_t { AtoB = 0, BtoA = 1 };

inline Direction direction_from(Role sender) { return sender == Role::A ? Direction::AtoB : Direction::BtoA; }
inline Role sender_of(Direction d) { return d == Direction::AtoB ? Role::A : Role::B; }
inline Role receiver_of(Direction d) { return d == Direction::AtoB ? Role::B : Role::A; }
std::string_view to_string(Direction d);
std::string_view to_string(Role r);

/// Hard cap on payload size accepted by the decoder.
inline constexpr std::uint32_t kMaxPayload = 1u << 24;

struct Message {
  std::uint8_t tag = 0;
  Bytes payload;

  friend bool operator==(const Message&, const Message&) = default;
};

/// Who may send a tag and which protocol stage it belongs to.
struct TagInfo {
  std::uint8_t tag;
  Direction direction;
  std::string step_label;
  std::string name;
};

class TagCatalog {
 public:
  TagCatalog() = default;
  TagCatalog(std::initializer_list<TagInfo> entries);

  const TagInfo* find(std::uint8_t tag) const;
  const std::vector<TagInfo>& entries() const { return entries_; }

 private:
  std::vector<TagInfo> entries_;
};

/// Stage names used as transcript step labels.
bool is_known_step_label(std::string_view label);

/// Static, public description of a protocol. Both parties hold it before
/// the session starts.
struct ProtocolInfo {
  std::string id;
  std::string title;
  std::string reference;
  TagCatalog tags;
  std::string output_domain_a;
  std::string output_domain_b;
};

/// Frame: tag byte, 4-byte big-endian payload length, payload.
Bytes encode_message(const Message& m);
/// Decodes exactly one frame. Throws FramingError on truncation, a length
/// above kMaxPayload, trailing bytes, or (when `catalog` is given) an
/// unregistered tag.
Message decode_message(ByteView frame, const TagCatalog* catalog = nullptr);

struct TranscriptEntry {
  Direction direction;
  std::string step_label;
  Message message;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

/// Append-only ordered record of a session.
class Transcript {
 public:
  void append(TranscriptEntry e) { entries_.push_back(std::move(e)); }
  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const TranscriptEntry& operator[](std::size_t i) const { return entries_.at(i); }

  /// Canonical bytes: per entry, direction byte, label length and label, frame.
  Bytes serialize() const;
  /// Bytes as seen by `role`: each frame prefixed by 'i' (received) or 'o' (sent).
  Bytes view_of(Role role) const;

  friend bool operator==(const Transcript&, const Transcript&) = default;

 private:
  std::vector<TranscriptEntry> entries_;
};

/// One party's state machine. A party sees only its own randomness stream
/// (handed to its factory) and the messages delivered to it.
class PartyMachine {
 public:
  virtual ~PartyMachine() = default;

  /// Messages to send before anything is received (may be empty).
  virtual std::vector<Message> start() = 0;
  /// Handles one incoming message and returns the replies. Throws
  /// VerificationError or FramingError to abort the session.
  virtual std::vector<Message> receive(const Message& incoming) = 0;
  virtual bool finished() const = 0;
  /// Deterministic serialization of the private output y_i.
  virtual Bytes private_output() const = 0;
  virtual std::string summary() const = 0;
};

using PartyFactory = std::function<std::unique_ptr<PartyMachine>(RandomStream)>;

enum class Transport { InProcess, Loopback };
std::string_view to_string(Transport t);
std::optional<Transport> parse_transport(std::string_view s);

/// Byte transport between the two parties. Frames are written whole and
/// read back in FIFO order per direction.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(Direction d, ByteView frame) = 0;
  /// Next complete frame travelling in direction `d`. Throws FramingError
  /// when no complete frame is available.
  virtual Bytes receive(Direction d) = 0;
};

std::unique_ptr<Channel> make_channel(Transport t);

/// Everything one party observed: its seed and the messages delivered to it.
struct LocalView {
  std::uint64_t seed = 0;
  std::vector<Message> incoming;
};

struct PartyOutcome {
  Role role = Role::A;
  bool finished = false;
  Bytes private_output;
  std::string summary;
  LocalView view;
};

enum class AbortKind { Verification, Framing, Deadlock };
std::string_view to_string(AbortKind k);

struct Abort {
  AbortKind kind;
  Role detected_by;
  /// Transcript index of the offending message (transcript size when the
  /// problem was detected before the message was recorded).
  std::size_t step_index;
  std::string step_label;
  std::string reason;
};

struct SessionResult {
  Transcript transcript;
  PartyOutcome a;
  PartyOutcome b;
  std::optional<Abort> abort;
  std::shared_ptr<PartyMachine> party_a;
  std::shared_ptr<PartyMachine> party_b;

  bool ok() const { return !abort.has_value(); }
  const PartyOutcome& outcome(Role r) const { return r == Role::A ? a : b; }

  /// Concrete party state for typed result extraction.
  template <class T>
  const T& party(Role r) const {
    return dynamic_cast<const T&>(r == Role::A ? *party_a : *party_b);
  }
};

/// Drives both state machines to completion over a fresh channel. The run
/// is a pure function of (factories, seeds); the transport does not affect
/// the transcript.
SessionResult run_session(const ProtocolInfo& protocol, const PartyFactory& make_a, const PartyFactory& make_b,
                          std::uint64_t seed_a, std::uint64_t seed_b, Transport transport = Transport::InProcess);

/// Rebuilds the party from its factory and local view alone and checks that
/// it reaches the same private output and completion state.
bool replay_matches(const PartyFactory& make, const PartyOutcome& outcome);

/// Boolean verdict with a human-readable explanation.
struct CheckResult {
  bool ok = false;
  std::string diagnostic;
  explicit operator bool() const { return ok; }
};

/// Expected (y_A, y_B) from the functional definition evaluated on the true
/// inputs and random choices held by the two parties.
using FunctionalDefinition =
    std::function<std::pair<Bytes, Bytes>(const PartyMachine& a, const PartyMachine& b)>;

/// Correctness: completed run whose private outputs equal expected_f.
CheckResult check_correctness(const SessionResult& result, const FunctionalDefinition& expected_f);

/// Fairness: the definition publishes both output domains and labels every
/// message with a known stage before any session starts.
CheckResult check_fairness(const ProtocolInfo& protocol);

/// Produces one transcript for a pair of seeds. Must be thread-safe.
using TranscriptSource = std::function<Transcript(std::uint64_t seed_a, std::uint64_t seed_b)>;

/// Counts keyed by hex-serialized role views.
using FrequencyTable = std::map<std::string, std::size_t>;

/// Empirical distribution of `role`'s view over `trials` fresh seed pairs
/// derived from `first_seed`. Throws InvalidArgument when trials < 1000.
FrequencyTable transcript_distribution(const TranscriptSource& source, Role role, std::size_t trials,
                                       std::uint64_t first_seed = 0);

/// Seed pair used for trial `i` of a run starting at `first_seed`.
std::pair<std::uint64_t, std::uint64_t> trial_seeds(std::uint64_t first_seed, std::size_t i);

}  // namespace tpc::session
