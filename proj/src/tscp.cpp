#include "tpc/derived.hpp"

namespace tpc::derived {

using oblivious::DlpOtReply;
using protocol::make_message;
using protocol::Payload;
using protocol::require;
using session::Direction;
using session::Message;
using session::Role;

namespace {

constexpr std::uint8_t kSetup = 0x90;
constexpr std::uint8_t kATransfer = 0x91;
constexpr std::uint8_t kBTransfer = 0x92;
constexpr std::uint8_t kAComputation = 0x93;
constexpr std::uint8_t kBComputation = 0x94;

session::TagCatalog tscp_tags() {
  return {{kSetup, Direction::AtoB, "Set-up", "parameters"},
          {kATransfer, Direction::AtoB, "Transfer", "a-keys"},
          {kBTransfer, Direction::BtoA, "Transfer", "b-replies-and-keys"},
          {kAComputation, Direction::AtoB, "Computation", "a-replies-and-sum"},
          {kBComputation, Direction::BtoA, "Computation", "b-sum-and-verdict"}};
}

void check_shape(const TscpShape& s, const BigInt& p) {
  require(s.n >= 1 && s.instances >= 1, "empty comparison");
  require(s.k >= 1 && s.k < bit_length(p), "mask length must be in [1, bitlen(p))");
}

void write_keys(ByteWriter& w, const std::vector<oblivious::DlpChooser>& choosers) {
  for (const auto& ch : choosers) oblivious::write_dlp_keys(w, ch.beta(0), ch.beta(1));
}

std::vector<std::pair<BigInt, BigInt>> read_keys(ByteReader& r, std::size_t n) {
  std::vector<std::pair<BigInt, BigInt>> keys;
  for (std::size_t i = 0; i < n; ++i) keys.push_back(oblivious::read_dlp_keys(r));
  return keys;
}

std::vector<DlpOtReply> read_replies(ByteReader& r, std::size_t n, std::size_t k) {
  std::vector<DlpOtReply> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(oblivious::read_dlp_reply(r, k));
  return out;
}

BitString read_sum(ByteReader& r, std::size_t k) {
  BitString s = read_bits(r);
  require(s.size() == k, "published sum has the wrong length");
  return s;
}

void read_instance(ByteReader& r, std::size_t expected) {
  require(r.u16() == expected, "instance index out of order");
}

/// XOR of `other`'s masks picked by `self`'s bits and `self`'s own masks picked the same way.
BitString published_sum(const TscpInstance& self, const TscpInstance& other) {
  BitString s(self.masks.front()[0].size());
  for (std::size_t i = 0; i < self.masks.size(); ++i) {
    const int b = self.secret.bit(i) ? 1 : 0;
    s ^= other.masks[i][b];
    s ^= self.masks[i][b];
  }
  return s;
}

std::uint8_t verdict_byte(Role role, bool stop, const std::vector<TscpInstance>& mine) {
  std::optional<std::size_t> first;
  for (std::size_t i = 0; i < mine.size() && !first; ++i)
    if (mine[i].differ) first = i;
  if (!stop) return first ? 1 : 0;
  if (!first) return 1;
  const bool own_bit = mine[*first].secret.bit(0);
  // At a true difference A's bit is 1 exactly when A is richer.
  return role == Role::A ? (own_bit ? 0 : 1) : (own_bit ? 1 : 0);
}

const session::ProtocolInfo& make_info(const char* id, const char* title, const char* reference,
                                       const char* out_a, const char* out_b) {
  static std::vector<std::unique_ptr<session::ProtocolInfo>> store;
  store.push_back(std::make_unique<session::ProtocolInfo>(
      session::ProtocolInfo{id, title, reference, tscp_tags(), out_a, out_b}));
  return *store.back();
}

}  // namespace

const session::ProtocolInfo& tscp_protocol() {
  static const auto& info = make_info("tscp", "Two-sided comparison of n-bit secrets",
                                      "Masks exchanged by 1-out-of-2 OT; equal published sums mean possibly equal",
                                      "verdict: 0 possibly equal, 1 different", "verdict: 0 possibly equal, 1 different");
  return info;
}

const session::ProtocolInfo& byzantine_agreement_protocol() {
  static const auto& info = make_info("byzantine-agreement", "Agreement check on one bit",
                                      "Two-sided comparison with n = 1 and k = 1",
                                      "verdict: 0 possibly equal, 1 different", "verdict: 0 possibly equal, 1 different");
  return info;
}

const session::ProtocolInfo& string_verification_protocol() {
  static const auto& info = make_info("sv", "String verification",
                                      "Two-sided comparison of whole strings with long masks",
                                      "verdict: 0 equal, 1 different", "verdict: 0 equal, 1 different");
  return info;
}

const session::ProtocolInfo& millionaires_protocol() {
  static const auto& info = make_info("millionaires", "Millionaires comparison",
                                      "One-bit comparisons from the most significant bit down; the first difference decides",
                                      "0 when A is richer, 1 otherwise", "0 when A is richer, 1 otherwise");
  return info;
}

TscpParty::TscpParty(Role role, TscpConfig config, RandomStream rng)
    : Party(std::move(rng)), role_(role), config_(std::move(config)) {
  secrets_ = role_ == Role::A ? config_.secret_a : config_.secret_b;
  if (secrets_.empty()) throw InvalidArgument("comparison needs at least one instance");
  for (const auto& s : secrets_)
    if (s.size() != secrets_.front().size() || s.size() == 0) throw InvalidArgument("instance secrets differ in length");
  if (secrets_.size() > 0xffff || secrets_.front().size() > 0xffff || config_.k > 0xffff)
    throw InvalidArgument("comparison too large");
}

std::optional<std::size_t> TscpParty::first_difference() const {
  for (std::size_t i = 0; i < instances_.size(); ++i)
    if (instances_[i].differ) return i;
  return std::nullopt;
}

bool TscpParty::instance_is_last(std::size_t idx) const {
  return idx + 1 == shape_.instances || (shape_.stop_on_difference && instances_[idx].differ);
}

void TscpParty::prepare_instance() {
  TscpInstance inst;
  inst.secret = secrets_[current_];
  choosers_.clear();
  for (std::size_t i = 0; i < shape_.n; ++i) {
    inst.masks.push_back({BitString::random(shape_.k, rng_), BitString::random(shape_.k, rng_)});
    choosers_.emplace_back(*field_, c_, inst.secret.bit(i), rng_);
  }
  instances_.push_back(std::move(inst));
}

BitString TscpParty::sum_for(const TscpInstance& inst) const {
  BitString s(shape_.k);
  for (std::size_t i = 0; i < shape_.n; ++i) {
    s ^= inst.received[i];
    s ^= inst.masks[i][inst.secret.bit(i) ? 1 : 0];
  }
  return s;
}

std::vector<Message> TscpParty::begin_instance() {
  prepare_instance();
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(current_));
  if (config_.cheat_a_bad_keys) {
    for (const auto& ch : choosers_)
      oblivious::write_dlp_keys(w, ch.beta(0), mod(ch.beta(1) * field_->g(), field_->p()));
  } else {
    write_keys(w, choosers_);
  }
  return {make_message(kATransfer, std::move(w))};
}

std::vector<Message> TscpParty::start() {
  if (role_ != Role::A) return {};
  field_ = config_.field ? *config_.field : numtheory::gen_field(config_.bits, rng_);
  c_ = oblivious::dlp_ot_element(field_->p());
  shape_ = {secrets_.front().size(), config_.k, secrets_.size(), config_.stop_on_difference};
  check_shape(shape_, field_->p());
  ByteWriter w;
  protocol::write_field(w, *field_);
  w.u16(static_cast<std::uint16_t>(shape_.n));
  w.u16(static_cast<std::uint16_t>(shape_.k));
  w.u16(static_cast<std::uint16_t>(shape_.instances));
  w.u8(shape_.stop_on_difference ? 1 : 0);
  std::vector<Message> out{make_message(kSetup, std::move(w))};
  for (auto& m : begin_instance()) out.push_back(std::move(m));
  return out;
}

std::vector<Message> TscpParty::receive(const Message& m) {
  if (role_ == Role::B) {
    if (m.tag == kSetup) {
      require(!field_, "set-up sent twice");
      Payload in(m, "parameters");
      field_ = protocol::read_field(*in);
      shape_.n = in->u16();
      shape_.k = in->u16();
      shape_.instances = in->u16();
      const std::uint8_t stop = in->u8();
      in.done();
      require(stop <= 1, "stop flag must be 0 or 1");
      shape_.stop_on_difference = stop == 1;
      check_shape(shape_, field_->p());
      require(shape_.n == secrets_.front().size(), "secret lengths differ");
      require(shape_.instances == secrets_.size(), "instance counts differ");
      c_ = oblivious::dlp_ot_element(field_->p());
      return {};
    }
    if (m.tag == kATransfer) {
      require(field_.has_value() && current_ < shape_.instances && instances_.size() == current_, "unexpected message");
      Payload in(m, "a-keys");
      read_instance(*in, current_);
      const auto keys = read_keys(*in, shape_.n);
      in.done();
      for (const auto& [b0, b1] : keys) oblivious::check_dlp_keys(*field_, c_, b0, b1);
      prepare_instance();
      const TscpInstance& inst = instances_.back();
      ByteWriter w;
      w.u16(static_cast<std::uint16_t>(current_));
      for (std::size_t i = 0; i < shape_.n; ++i)
        oblivious::write_dlp_reply(w, oblivious::dlp_ot_respond(*field_, keys[i].first, keys[i].second,
                                                                inst.masks[i][0], inst.masks[i][1], rng_));
      write_keys(w, choosers_);
      return {make_message(kBTransfer, std::move(w))};
    }
    require(m.tag == kAComputation && instances_.size() == current_ + 1, "unexpected message");
    Payload in(m, "a-replies-and-sum");
    read_instance(*in, current_);
    const auto replies = read_replies(*in, shape_.n, shape_.k);
    BitString other = read_sum(*in, shape_.k);
    in.done();
    TscpInstance& inst = instances_.back();
    for (std::size_t i = 0; i < shape_.n; ++i) {
      const int b = inst.secret.bit(i) ? 1 : 0;
      inst.received.push_back(choosers_[i].recover(replies[i].alpha[b], replies[i].masked[b]));
    }
    inst.own_sum = sum_for(inst);
    inst.other_sum = std::move(other);
    inst.differ = inst.own_sum != inst.other_sum;
    ByteWriter w;
    w.u16(static_cast<std::uint16_t>(current_));
    write_bits(w, inst.own_sum);
    w.u8(inst.differ ? 1 : 0);
    if (instance_is_last(current_)) finished_ = true;
    ++current_;
    return {make_message(kBComputation, std::move(w))};
  }

  if (m.tag == kBTransfer) {
    require(instances_.size() == current_ + 1 && instances_.back().received.empty(), "unexpected message");
    Payload in(m, "b-replies-and-keys");
    read_instance(*in, current_);
    const auto replies = read_replies(*in, shape_.n, shape_.k);
    const auto keys = read_keys(*in, shape_.n);
    in.done();
    for (const auto& [b0, b1] : keys) oblivious::check_dlp_keys(*field_, c_, b0, b1);
    TscpInstance& inst = instances_.back();
    for (std::size_t i = 0; i < shape_.n; ++i) {
      const int b = inst.secret.bit(i) ? 1 : 0;
      inst.received.push_back(choosers_[i].recover(replies[i].alpha[b], replies[i].masked[b]));
    }
    inst.own_sum = sum_for(inst);
    ByteWriter w;
    w.u16(static_cast<std::uint16_t>(current_));
    for (std::size_t i = 0; i < shape_.n; ++i)
      oblivious::write_dlp_reply(w, oblivious::dlp_ot_respond(*field_, keys[i].first, keys[i].second,
                                                              inst.masks[i][0], inst.masks[i][1], rng_));
    write_bits(w, inst.own_sum);
    return {make_message(kAComputation, std::move(w))};
  }
  require(m.tag == kBComputation && instances_.size() == current_ + 1 && !instances_.back().received.empty(),
          "unexpected message");
  Payload in(m, "b-sum-and-verdict");
  read_instance(*in, current_);
  BitString other = read_sum(*in, shape_.k);
  const std::uint8_t verdict = in->u8();
  in.done();
  TscpInstance& inst = instances_.back();
  inst.other_sum = std::move(other);
  inst.differ = inst.own_sum != inst.other_sum;
  require(verdict == (inst.differ ? 1 : 0), "counterpart's verdict contradicts the published sums");
  if (instance_is_last(current_)) {
    finished_ = true;
    return {};
  }
  ++current_;
  return begin_instance();
}

Bytes TscpParty::private_output() const {
  if (!finished_) return {};
  return {verdict_byte(role_, shape_.stop_on_difference, instances_)};
}

std::string TscpParty::summary() const {
  if (!finished_) return "incomplete after " + std::to_string(instances_.size()) + " instances";
  const auto first = first_difference();
  std::string s = std::to_string(instances_.size()) + " instance(s), ";
  if (shape_.stop_on_difference)
    return s + (first ? "first difference at instance " + std::to_string(*first) : std::string("no difference found")) +
           "; verdict " + std::to_string(verdict_byte(role_, true, instances_));
  return s + (first ? "sums differ: different" : "sums equal: possibly equal");
}

SessionResult run_tscp(const session::ProtocolInfo& info, const TscpConfig& config, std::uint64_t seed_a,
                       std::uint64_t seed_b, Transport transport) {
  return session::run_session(
      info, [&](RandomStream r) { return std::make_unique<TscpParty>(Role::A, config, std::move(r)); },
      [&](RandomStream r) { return std::make_unique<TscpParty>(Role::B, config, std::move(r)); }, seed_a, seed_b,
      transport);
}

SessionResult tscp_general(const BitString& s_a, const BitString& s_b, std::size_t k, std::uint64_t seed_a,
                           std::uint64_t seed_b, Transport transport, std::size_t field_bits) {
  TscpConfig c;
  c.bits = field_bits;
  c.k = k;
  c.secret_a = {s_a};
  c.secret_b = {s_b};
  return run_tscp(tscp_protocol(), c, seed_a, seed_b, transport);
}

SessionResult byzantine_agreement(bool bit_a, bool bit_b, std::uint64_t seed_a, std::uint64_t seed_b,
                                  Transport transport, std::size_t field_bits) {
  TscpConfig c;
  c.bits = field_bits;
  c.k = 1;
  c.secret_a = {BitString::parse(bit_a ? "1" : "0")};
  c.secret_b = {BitString::parse(bit_b ? "1" : "0")};
  return run_tscp(byzantine_agreement_protocol(), c, seed_a, seed_b, transport);
}

SessionResult string_verification(const BitString& s_a, const BitString& s_b, std::size_t k, std::uint64_t seed_a,
                                  std::uint64_t seed_b, Transport transport, std::size_t field_bits) {
  TscpConfig c;
  c.bits = field_bits;
  c.k = k;
  c.secret_a = {s_a};
  c.secret_b = {s_b};
  return run_tscp(string_verification_protocol(), c, seed_a, seed_b, transport);
}

SessionResult millionaires(std::uint64_t w_a, std::uint64_t w_b, std::size_t bit_width, std::size_t k,
                           std::uint64_t seed_a, std::uint64_t seed_b, Transport transport, std::size_t field_bits) {
  if (bit_width == 0 || bit_width > 64) throw InvalidArgument("bit width must be in [1, 64]");
  if (bit_width < 64 && ((w_a >> bit_width) != 0 || (w_b >> bit_width) != 0))
    throw InvalidArgument("wealth does not fit in the bit width");
  TscpConfig c;
  c.bits = field_bits;
  c.k = k;
  c.stop_on_difference = true;
  for (std::size_t i = bit_width; i-- > 0;) {
    c.secret_a.push_back(BitString::parse(((w_a >> i) & 1) ? "1" : "0"));
    c.secret_b.push_back(BitString::parse(((w_b >> i) & 1) ? "1" : "0"));
  }
  return run_tscp(millionaires_protocol(), c, seed_a, seed_b, transport);
}

std::pair<int, int> tscp_verdicts(const SessionResult& r) {
  auto v = [](const Bytes& b) { return b.size() == 1 ? static_cast<int>(b[0]) : -1; };
  return {v(r.a.private_output), v(r.b.private_output)};
}

session::FunctionalDefinition tscp_definition() {
  return [](const session::PartyMachine& pa, const session::PartyMachine& pb) {
    const auto& a = dynamic_cast<const TscpParty&>(pa);
    const auto& b = dynamic_cast<const TscpParty&>(pb);
    std::vector<TscpInstance> va, vb;
    const std::size_t count = std::min(a.instances().size(), b.instances().size());
    for (std::size_t i = 0; i < count; ++i) {
      TscpInstance ia = a.instances()[i], ib = b.instances()[i];
      ia.differ = ib.differ = published_sum(ia, ib) != published_sum(ib, ia);
      va.push_back(std::move(ia));
      vb.push_back(std::move(ib));
    }
    return std::pair<Bytes, Bytes>{Bytes{verdict_byte(Role::A, a.stops_on_difference(), va)},
                                   Bytes{verdict_byte(Role::B, b.stops_on_difference(), vb)}};
  };
}

session::FunctionalDefinition millionaires_definition() { return tscp_definition(); }

void verify_tscp(const session::Transcript& t, const session::ProtocolInfo& info) {
  protocol::verify_with_cursor(t, info, [](protocol::TranscriptCursor& c) {
    ByteReader r = c.next(kSetup);
    const FieldContext field = protocol::read_field(r);
    TscpShape shape;
    shape.n = r.u16();
    shape.k = r.u16();
    shape.instances = r.u16();
    const std::uint8_t stop = r.u8();
    r.expect_done("parameters");
    require(stop <= 1, "stop flag must be 0 or 1");
    shape.stop_on_difference = stop == 1;
    check_shape(shape, field.p());
    const BigInt elem = oblivious::dlp_ot_element(field.p());
    for (std::size_t idx = 0; idx < shape.instances; ++idx) {
      r = c.next(kATransfer);
      read_instance(r, idx);
      for (const auto& [b0, b1] : read_keys(r, shape.n)) oblivious::check_dlp_keys(field, elem, b0, b1);
      r.expect_done("a-keys");
      r = c.next(kBTransfer);
      read_instance(r, idx);
      (void)read_replies(r, shape.n, shape.k);
      for (const auto& [b0, b1] : read_keys(r, shape.n)) oblivious::check_dlp_keys(field, elem, b0, b1);
      r.expect_done("b-replies-and-keys");
      r = c.next(kAComputation);
      read_instance(r, idx);
      (void)read_replies(r, shape.n, shape.k);
      const BitString sa = read_sum(r, shape.k);
      r.expect_done("a-replies-and-sum");
      r = c.next(kBComputation);
      read_instance(r, idx);
      const BitString sb = read_sum(r, shape.k);
      const std::uint8_t verdict = r.u8();
      r.expect_done("b-sum-and-verdict");
      require(verdict == (sa != sb ? 1 : 0), "verdict contradicts the published sums");
      if (shape.stop_on_difference && sa != sb) break;
    }
  });
}

}  // namespace tpc::derived
