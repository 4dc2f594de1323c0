#include "tpc/session.hpp"

#include <fcntl.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <deque>
#include <mutex>

#include "tpc/errors.hpp"
#include "tpc/statistics.hpp"

namespace tpc::session {

namespace {

constexpr std::size_t kHeaderSize = 5;
// Livelock guard for the driver.
constexpr std::size_t kMaxMessages = 1u << 20;

constexpr std::array<std::string_view, 9> kStepLabels = {"Set-up",     "Challenge", "Response", "Verification",
                                                          "Commitment", "Opening",   "Transfer", "Computation",
                                                          "Close"};

}  // namespace

std::string_view to_string(Direction d) { return d == Direction::AtoB ? "A->B" : "B->A"; }
std::string_view to_string(Role r) { return r == Role::A ? "A" : "B"; }

std::string_view to_string(Transport t) { return t == Transport::InProcess ? "inproc" : "loopback"; }

std::optional<Transport> parse_transport(std::string_view s) {
  if (s == "inproc") return Transport::InProcess;
  if (s == "loopback") return Transport::Loopback;
  return std::nullopt;
}

std::string_view to_string(AbortKind k) {
  switch (k) {
    case AbortKind::Verification:
      return "verification";
    case AbortKind::Framing:
      return "framing";
    case AbortKind::Deadlock:
      return "deadlock";
  }
  return "?";
}

TagCatalog::TagCatalog(std::initializer_list<TagInfo> entries) : entries_(entries) {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    for (std::size_t j = i + 1; j < entries_.size(); ++j)
      if (entries_[i].tag == entries_[j].tag) throw InvalidArgument("duplicate tag in catalog");
}

const TagInfo* TagCatalog::find(std::uint8_t tag) const {
  for (const auto& e : entries_)
    if (e.tag == tag) return &e;
  return nullptr;
}

bool is_known_step_label(std::string_view label) {
  for (auto l : kStepLabels)
    if (l == label) return true;
  return false;
}

Bytes encode_message(const Message& m) {
  if (m.payload.size() > kMaxPayload) throw InvalidArgument("payload exceeds maximum frame size");
  ByteWriter w;
  w.u8(m.tag);
  w.u32(static_cast<std::uint32_t>(m.payload.size()));
  w.raw(m.payload);
  return std::move(w).take();
}

Message decode_message(ByteView frame, const TagCatalog* catalog) {
  ByteReader r(frame);
  if (frame.size() < kHeaderSize) throw FramingError("truncated frame header");
  Message m;
  m.tag = r.u8();
  const std::uint32_t len = r.u32();
  if (len > kMaxPayload) throw FramingError("declared payload length exceeds maximum");
  if (len > r.remaining()) throw FramingError("declared payload length exceeds remaining bytes");
  ByteView body = r.raw(len);
  m.payload.assign(body.begin(), body.end());
  r.expect_done("frame");
  if (catalog && !catalog->find(m.tag)) throw FramingError("unknown message tag");
  return m;
}

Bytes Transcript::serialize() const {
  ByteWriter w;
  for (const auto& e : entries_) {
    w.u8(static_cast<std::uint8_t>(e.direction));
    w.u8(static_cast<std::uint8_t>(e.step_label.size()));
    w.raw(ByteView(reinterpret_cast<const std::uint8_t*>(e.step_label.data()), e.step_label.size()));
    w.raw(encode_message(e.message));
  }
  return std::move(w).take();
}

Bytes Transcript::view_of(Role role) const {
  ByteWriter w;
  for (const auto& e : entries_) {
    w.u8(receiver_of(e.direction) == role ? 'i' : 'o');
    w.raw(encode_message(e.message));
  }
  return std::move(w).take();
}

namespace {

class InProcessChannel final : public Channel {
 public:
  void send(Direction d, ByteView frame) override { queue(d).emplace_back(frame.begin(), frame.end()); }

  Bytes receive(Direction d) override {
    auto& q = queue(d);
    if (q.empty()) throw FramingError("no frame available");
    Bytes out = std::move(q.front());
    q.pop_front();
    return out;
  }

 private:
  std::deque<Bytes>& queue(Direction d) { return d == Direction::AtoB ? a_to_b_ : b_to_a_; }

  std::deque<Bytes> a_to_b_;
  std::deque<Bytes> b_to_a_;
};

// Byte stream over an AF_UNIX socket pair. Both ends are non-blocking; when
// the kernel buffer fills during a send, pending bytes are drained into the
// receiving side's buffer so a single thread can drive both ends.
class LoopbackChannel final : public Channel {
 public:
  LoopbackChannel() {
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds_) != 0) throw Error(std::string("socketpair: ") + std::strerror(errno));
    for (int fd : fds_) ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK);
  }
  ~LoopbackChannel() override {
    ::close(fds_[0]);
    ::close(fds_[1]);
  }
  LoopbackChannel(const LoopbackChannel&) = delete;
  LoopbackChannel& operator=(const LoopbackChannel&) = delete;

  void send(Direction d, ByteView frame) override {
    const int fd = d == Direction::AtoB ? fds_[0] : fds_[1];
    std::size_t off = 0;
    while (off < frame.size()) {
      ssize_t n = ::write(fd, frame.data() + off, frame.size() - off);
      if (n > 0) {
        off += static_cast<std::size_t>(n);
      } else if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
        drain(d);
      } else if (n < 0 && errno != EINTR) {
        throw Error(std::string("loopback write: ") + std::strerror(errno));
      }
    }
  }

  Bytes receive(Direction d) override {
    drain(d);
    auto& buf = buffer(d);
    if (buf.size() < kHeaderSize) throw FramingError("truncated frame on loopback stream");
    const std::size_t len = (std::size_t{buf[1]} << 24) | (std::size_t{buf[2]} << 16) | (std::size_t{buf[3]} << 8) | buf[4];
    if (len > kMaxPayload) throw FramingError("declared payload length exceeds maximum");
    if (buf.size() < kHeaderSize + len) throw FramingError("truncated frame on loopback stream");
    Bytes out(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(kHeaderSize + len));
    buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(kHeaderSize + len));
    return out;
  }

 private:
  std::deque<std::uint8_t>& buffer(Direction d) { return d == Direction::AtoB ? at_b_ : at_a_; }

  void drain(Direction d) {
    const int fd = d == Direction::AtoB ? fds_[1] : fds_[0];
    auto& buf = buffer(d);
    std::array<std::uint8_t, 4096> chunk{};
    for (;;) {
      ssize_t n = ::read(fd, chunk.data(), chunk.size());
      if (n > 0) {
        buf.insert(buf.end(), chunk.begin(), chunk.begin() + n);
      } else if (n < 0 && errno == EINTR) {
        continue;
      } else {
        return;
      }
    }
  }

  int fds_[2] = {-1, -1};
  std::deque<std::uint8_t> at_b_;
  std::deque<std::uint8_t> at_a_;
};

}  // namespace

std::unique_ptr<Channel> make_channel(Transport t) {
  if (t == Transport::Loopback) return std::make_unique<LoopbackChannel>();
  return std::make_unique<InProcessChannel>();
}

namespace {

class Driver {
 public:
  Driver(const ProtocolInfo& protocol, Transport transport) : protocol_(protocol), channel_(make_channel(transport)) {}

  SessionResult run(const PartyFactory& make_a, const PartyFactory& make_b, std::uint64_t seed_a, std::uint64_t seed_b) {
    result_.a.role = Role::A;
    result_.b.role = Role::B;
    result_.a.view.seed = seed_a;
    result_.b.view.seed = seed_b;
    result_.party_a = make_a(RandomStream(seed_a));
    result_.party_b = make_b(RandomStream(seed_b));

    if (invoke(Role::A, [&](PartyMachine& p) { return p.start(); }) &&
        invoke(Role::B, [&](PartyMachine& p) { return p.start(); })) {
      loop();
    }
    finish(result_.a, *result_.party_a);
    finish(result_.b, *result_.party_b);
    return std::move(result_);
  }

 private:
  PartyMachine& party(Role r) { return r == Role::A ? *result_.party_a : *result_.party_b; }
  PartyOutcome& outcome(Role r) { return r == Role::A ? result_.a : result_.b; }

  void fail(AbortKind kind, Role by, std::size_t index, std::string label, std::string reason) {
    if (!result_.abort) result_.abort = Abort{kind, by, index, std::move(label), std::move(reason)};
  }

  std::string label_at(std::size_t index) const {
    return index < result_.transcript.size() ? result_.transcript[index].step_label : std::string("?");
  }

  template <class Fn>
  bool invoke(Role r, Fn&& fn) {
    const std::size_t index = result_.transcript.empty() ? 0 : result_.transcript.size() - 1;
    std::vector<Message> out;
    try {
      out = fn(party(r));
    } catch (const FramingError& e) {
      fail(AbortKind::Framing, r, index, label_at(index), e.what());
      return false;
    } catch (const Error& e) {
      fail(AbortKind::Verification, r, index, label_at(index), e.what());
      return false;
    }
    for (auto& m : out)
      if (!emit(r, std::move(m))) return false;
    return true;
  }

  bool emit(Role from, Message m) {
    const std::size_t index = result_.transcript.size() + pending_.size();
    const TagInfo* info = protocol_.tags.find(m.tag);
    const Direction dir = direction_from(from);
    if (!info || info->direction != dir) {
      fail(AbortKind::Framing, from, index, info ? info->step_label : "?", "party emitted an unregistered message tag");
      return false;
    }
    if (m.payload.size() > kMaxPayload) {
      fail(AbortKind::Framing, from, index, info->step_label, "payload exceeds maximum frame size");
      return false;
    }
    channel_->send(dir, encode_message(m));
    pending_.push_back(dir);
    return true;
  }

  void loop() {
    while (!pending_.empty()) {
      if (result_.transcript.size() >= kMaxMessages) {
        fail(AbortKind::Deadlock, Role::A, result_.transcript.size(), "?", "message limit exceeded");
        return;
      }
      const Direction dir = pending_.front();
      pending_.pop_front();
      const Role to = receiver_of(dir);
      Message m;
      try {
        m = decode_message(channel_->receive(dir), &protocol_.tags);
      } catch (const FramingError& e) {
        fail(AbortKind::Framing, to, result_.transcript.size(), "?", e.what());
        return;
      }
      const TagInfo* info = protocol_.tags.find(m.tag);
      result_.transcript.append({dir, info->step_label, m});
      if (party(to).finished()) {
        fail(AbortKind::Framing, to, result_.transcript.size() - 1, info->step_label, "message after completion");
        return;
      }
      outcome(to).view.incoming.push_back(m);
      if (!invoke(to, [&](PartyMachine& p) { return p.receive(m); })) return;
    }
    if (!result_.party_a->finished() || !result_.party_b->finished()) {
      fail(AbortKind::Deadlock, result_.party_a->finished() ? Role::B : Role::A, result_.transcript.size(), "?",
           "deadlock: no message in flight and a party is still waiting");
    }
  }

  static void finish(PartyOutcome& out, const PartyMachine& p) {
    out.finished = p.finished();
    out.private_output = p.private_output();
    out.summary = p.summary();
  }

  const ProtocolInfo& protocol_;
  std::unique_ptr<Channel> channel_;
  std::deque<Direction> pending_;
  SessionResult result_;
};

}  // namespace

SessionResult run_session(const ProtocolInfo& protocol, const PartyFactory& make_a, const PartyFactory& make_b,
                          std::uint64_t seed_a, std::uint64_t seed_b, Transport transport) {
  Driver driver(protocol, transport);
  return driver.run(make_a, make_b, seed_a, seed_b);
}

bool replay_matches(const PartyFactory& make, const PartyOutcome& outcome) {
  auto p = make(RandomStream(outcome.view.seed));
  try {
    (void)p->start();
    for (const auto& m : outcome.view.incoming) (void)p->receive(m);
  } catch (const Error&) {
    // An aborting party aborts again on replay; compare the state it stopped in.
  }
  return p->finished() == outcome.finished && p->private_output() == outcome.private_output;
}

CheckResult check_correctness(const SessionResult& result, const FunctionalDefinition& expected_f) {
  if (result.abort) return {false, "session aborted at step '" + result.abort->step_label + "': " + result.abort->reason};
  auto [ya, yb] = expected_f(*result.party_a, *result.party_b);
  if (ya != result.a.private_output) return {false, "A's output differs from the functional definition"};
  if (yb != result.b.private_output) return {false, "B's output differs from the functional definition"};
  return {true, "outputs match the functional definition"};
}

CheckResult check_fairness(const ProtocolInfo& protocol) {
  if (protocol.output_domain_a.empty() || protocol.output_domain_b.empty())
    return {false, protocol.id + ": output domains are not published for both parties"};
  if (protocol.tags.entries().empty()) return {false, protocol.id + ": no message flow is declared"};
  for (const auto& t : protocol.tags.entries()) {
    if (!is_known_step_label(t.step_label))
      return {false, protocol.id + ": tag '" + t.name + "' has unknown stage '" + t.step_label + "'"};
  }
  return {true, protocol.id + ": output domains and message stages are public"};
}

std::pair<std::uint64_t, std::uint64_t> trial_seeds(std::uint64_t first_seed, std::size_t i) {
  const std::uint64_t base = mix_seed(first_seed + 2 * static_cast<std::uint64_t>(i));
  return {base, mix_seed(base ^ 0x5bd1e995u)};
}

FrequencyTable transcript_distribution(const TranscriptSource& source, Role role, std::size_t trials,
                                       std::uint64_t first_seed) {
  if (trials < 1000) throw InvalidArgument("transcript_distribution needs at least 1000 trials");
  FrequencyTable table;
  std::mutex mu;
  stats::parallel_for(trials, [&](std::size_t i) {
    auto [sa, sb] = trial_seeds(first_seed, i);
    std::string key = to_hex(source(sa, sb).view_of(role));
    std::lock_guard<std::mutex> lock(mu);
    ++table[key];
  });
  return table;
}

}  // namespace tpc::session
