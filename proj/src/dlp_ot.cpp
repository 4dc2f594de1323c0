#include "tpc/oblivious.hpp"

namespace tpc::oblivious {

using numtheory::inverse_mod;
using numtheory::pow_mod;
using protocol::make_message;
using protocol::Payload;
using protocol::require;
using session::Direction;
using session::Message;

namespace {

constexpr std::uint8_t kField = 0x21;
constexpr std::uint8_t kKeys = 0x22;
constexpr std::uint8_t kTransfer = 0x23;

void check_k(std::size_t k, const BigInt& p) {
  require(k >= 1 && k < bit_length(p), "secret length must be in [1, bit length of p)");
}

}  // namespace

BigInt dlp_ot_element(const BigInt& p) { return protocol::hash_to_element(kDlpOtLabel, p); }

DlpChooser::DlpChooser(const FieldContext& field, const BigInt& c, bool choice, RandomStream& rng)
    : p_(field.p()), choice_(choice) {
  x_ = rng.between(1, p_ - 2);
  const BigInt gx = pow_mod(field.g(), x_, p_);
  beta_[choice ? 1 : 0] = gx;
  beta_[choice ? 0 : 1] = mod(c * inverse_mod(gx, p_), p_);
}

BitString DlpChooser::recover(const BigInt& alpha, const BitString& masked) const {
  return masked ^ dlp_mask(pow_mod(alpha, x_, p_), p_, masked.size());
}

BitString dlp_mask(const BigInt& gamma, const BigInt& p, std::size_t k) {
  const Bytes encoded = fixed_width_bytes(gamma, byte_length(p));
  if (k > 8 * encoded.size()) throw InvalidArgument("mask longer than the element encoding");
  return BitString::low_bits(from_magnitude(encoded), k);
}

void check_dlp_keys(const FieldContext& field, const BigInt& c, const BigInt& beta0, const BigInt& beta1) {
  const BigInt& p = field.p();
  require(beta0 >= 1 && beta0 < p && beta1 >= 1 && beta1 < p, "keys are not elements of Z_p*");
  require(mod(beta0 * beta1, p) == c, "keys do not multiply to the public element c");
}

DlpOtReply dlp_ot_respond(const FieldContext& field, const BigInt& beta0, const BigInt& beta1, const BitString& s0,
                          const BitString& s1, RandomStream& rng) {
  if (s0.size() != s1.size()) throw InvalidArgument("secrets differ in length");
  const BigInt& p = field.p();
  DlpOtReply reply;
  const std::array<const BigInt*, 2> beta{&beta0, &beta1};
  const std::array<const BitString*, 2> secret{&s0, &s1};
  for (int j = 0; j < 2; ++j) {
    const BigInt y = rng.between(1, p - 2);
    reply.alpha[j] = pow_mod(field.g(), y, p);
    reply.masked[j] = *secret[j] ^ dlp_mask(pow_mod(*beta[j], y, p), p, s0.size());
  }
  return reply;
}

void write_dlp_keys(ByteWriter& w, const BigInt& beta0, const BigInt& beta1) {
  write_int(w, beta0);
  write_int(w, beta1);
}

std::pair<BigInt, BigInt> read_dlp_keys(ByteReader& r) {
  BigInt b0 = read_int(r);
  BigInt b1 = read_int(r);
  return {std::move(b0), std::move(b1)};
}

void write_dlp_reply(ByteWriter& w, const DlpOtReply& reply) {
  for (int j = 0; j < 2; ++j) {
    write_int(w, reply.alpha[j]);
    write_bits(w, reply.masked[j]);
  }
}

DlpOtReply read_dlp_reply(ByteReader& r, std::size_t k) {
  DlpOtReply reply;
  for (int j = 0; j < 2; ++j) {
    reply.alpha[j] = read_int(r);
    reply.masked[j] = read_bits(r);
    require(reply.masked[j].size() == k, "masked secret has the wrong length");
  }
  return reply;
}

const session::ProtocolInfo& dlp_ot_protocol() {
  static const session::ProtocolInfo info{
      "dlp-1of2-ot",
      "Discrete-log 1-out-of-2 oblivious transfer (chosen)",
      "Receiver obtains the secret it chose out of two; sender does not learn which",
      {{kField, Direction::AtoB, "Set-up", "field"},
       {kKeys, Direction::BtoA, "Challenge", "keys"},
       {kTransfer, Direction::AtoB, "Response", "transfer"}},
      "nothing",
      "choice i and secret s_i",
  };
  return info;
}

DlpOtSender::DlpOtSender(DlpOtConfig config, RandomStream rng) : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> DlpOtSender::start() {
  field_ = config_.field ? *config_.field : numtheory::gen_field(config_.bits, rng_);
  if (config_.k < 1 || config_.k >= bit_length(field_->p()))
    throw InvalidArgument("secret length must be in [1, bit length of p)");
  if (config_.secrets) {
    secrets_ = *config_.secrets;
    if (secrets_.first.size() != config_.k || secrets_.second.size() != config_.k)
      throw InvalidArgument("secrets must be exactly k bits");
  } else {
    secrets_.first = BitString::random(config_.k, rng_);
    secrets_.second = BitString::random(config_.k, rng_);
  }
  ByteWriter w;
  protocol::write_field(w, *field_);
  w.u16(static_cast<std::uint16_t>(config_.k));
  return {make_message(kField, std::move(w))};
}

std::vector<Message> DlpOtSender::receive(const Message& m) {
  require(m.tag == kKeys, "unexpected message");
  Payload in(m, "keys");
  auto [b0, b1] = read_dlp_keys(*in);
  in.done();
  check_dlp_keys(*field_, dlp_ot_element(field_->p()), b0, b1);
  DlpOtReply reply = dlp_ot_respond(*field_, b0, b1, secrets_.first, secrets_.second, rng_);
  if (config_.cheat_length) {
    for (auto& s : reply.masked) s = BitString::parse(s.to_string() + "0");
  }
  finished_ = true;
  ByteWriter w;
  write_dlp_reply(w, reply);
  return {make_message(kTransfer, std::move(w))};
}

std::string DlpOtSender::summary() const { return finished_ ? "sent both masked secrets" : "incomplete"; }

DlpOtReceiver::DlpOtReceiver(DlpOtConfig config, RandomStream rng)
    : Party(std::move(rng)), config_(std::move(config)) {
  choice_ = config_.choice ? *config_.choice : rng_.bit();
}

std::vector<Message> DlpOtReceiver::receive(const Message& m) {
  if (m.tag == kField) {
    require(!field_, "field sent twice");
    Payload in(m, "field");
    field_ = protocol::read_field(*in);
    k_ = in->u16();
    in.done();
    check_k(k_, field_->p());
    const BigInt c = dlp_ot_element(field_->p());
    ByteWriter w;
    if (config_.cheat_structure) {
      // Both logs known; resample in the unlikely case the product hits c.
      BigInt b0, b1;
      do {
        cheat_logs_[0] = rng_.between(1, field_->p() - 2);
        cheat_logs_[1] = rng_.between(1, field_->p() - 2);
        b0 = pow_mod(field_->g(), cheat_logs_[0], field_->p());
        b1 = pow_mod(field_->g(), cheat_logs_[1], field_->p());
      } while (mod(b0 * b1, field_->p()) == c);
      write_dlp_keys(w, b0, b1);
    } else {
      chooser_.emplace(*field_, c, choice_, rng_);
      write_dlp_keys(w, chooser_->beta(0), chooser_->beta(1));
    }
    return {make_message(kKeys, std::move(w))};
  }
  require(m.tag == kTransfer && field_, "unexpected message");
  Payload in(m, "transfer");
  DlpOtReply reply = read_dlp_reply(*in, k_);
  in.done();
  const int i = choice_ ? 1 : 0;
  if (chooser_) recovered_ = chooser_->recover(reply.alpha[i], reply.masked[i]);
  finished_ = true;
  return {};
}

Bytes DlpOtReceiver::private_output() const {
  ByteWriter w;
  w.u8(choice_ ? 1 : 0);
  if (recovered_) write_bits(w, *recovered_);
  return std::move(w).take();
}

std::string DlpOtReceiver::summary() const {
  if (!recovered_) return finished_ ? std::string("no secret recovered") : std::string("incomplete");
  return "recovered s" + std::to_string(choice_ ? 1 : 0) + " = " + recovered_->to_string();
}

std::vector<BigInt> DlpOtReceiver::known_logs() const {
  if (config_.cheat_structure) return {cheat_logs_[0], cheat_logs_[1]};
  return {};
}

SessionResult dlp_1of2_ot(const DlpOtConfig& config, std::uint64_t seed_a, std::uint64_t seed_b, Transport transport) {
  return session::run_session(
      dlp_ot_protocol(), [&](RandomStream r) { return std::make_unique<DlpOtSender>(config, std::move(r)); },
      [&](RandomStream r) { return std::make_unique<DlpOtReceiver>(config, std::move(r)); }, seed_a, seed_b,
      transport);
}

session::FunctionalDefinition dlp_ot_definition() {
  return [](const session::PartyMachine& pa, const session::PartyMachine& pb) {
    const auto& a = dynamic_cast<const DlpOtSender&>(pa);
    const auto& b = dynamic_cast<const DlpOtReceiver&>(pb);
    ByteWriter w;
    w.u8(b.choice() ? 1 : 0);
    write_bits(w, b.choice() ? a.secrets().second : a.secrets().first);
    return std::pair<Bytes, Bytes>{Bytes{}, std::move(w).take()};
  };
}

void verify_dlp_ot(const session::Transcript& t) {
  protocol::verify_with_cursor(t, dlp_ot_protocol(), [](protocol::TranscriptCursor& c) {
    ByteReader r = c.next(kField);
    FieldContext field = protocol::read_field(r);
    const std::size_t k = r.u16();
    r.expect_done("field");
    check_k(k, field.p());
    r = c.next(kKeys);
    auto [b0, b1] = read_dlp_keys(r);
    r.expect_done("keys");
    check_dlp_keys(field, dlp_ot_element(field.p()), b0, b1);
    r = c.next(kTransfer);
    DlpOtReply reply = read_dlp_reply(r, k);
    r.expect_done("transfer");
    for (const auto& a : reply.alpha) require(a >= 1 && a < field.p(), "alpha is not an element of Z_p*");
  });
}

}  // namespace tpc::oblivious
