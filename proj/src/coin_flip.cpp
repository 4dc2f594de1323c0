#include "tpc/derived.hpp"

namespace tpc::derived {

using numtheory::pow_mod;
using protocol::make_message;
using protocol::Payload;
using protocol::require;
using session::Direction;
using session::Message;

namespace {

constexpr std::uint8_t kQrpCommit = 0x51;
constexpr std::uint8_t kQrpBet = 0x52;
constexpr std::uint8_t kQrpOpen = 0x53;

constexpr std::uint8_t kGenCommit = 0x61;
constexpr std::uint8_t kGenBet = 0x62;
constexpr std::uint8_t kGenOpen = 0x63;

bool is_odd(const BigInt& v) { return mpz_odd_p(v.get_mpz_t()) != 0; }

CoinResult settle(bool outcome, bool bet, std::vector<BigInt> proof) {
  return CoinResult{outcome, bet == outcome ? Winner::B : Winner::A, std::move(proof)};
}

bool read_bet(const Message& m) {
  Payload in(m, "bet");
  const std::uint8_t b = in->u8();
  in.done();
  require(b <= 1, "bet must be 0 (even) or 1 (odd)");
  return b == 1;
}

Message bet_message(std::uint8_t tag, bool bet) {
  ByteWriter w;
  w.u8(bet ? 1 : 0);
  return make_message(tag, std::move(w));
}

BlumModulus non_blum_modulus(std::size_t bits, RandomStream& rng) {
  const std::size_t half = bits / 2;
  for (;;) {
    BigInt p = numtheory::random_prime(half, false, rng);
    if (mod(p, 4) != 1) continue;
    BigInt q = numtheory::random_prime(bits - half, true, rng);
    if (p != q) return BlumModulus(p, q, false);
  }
}

}  // namespace

Bytes encode_coin(const CoinResult& r) {
  return Bytes{static_cast<std::uint8_t>(r.outcome ? 1 : 0), static_cast<std::uint8_t>(r.winner)};
}

// ----------------------------------------------------------------------------

const session::ProtocolInfo& coin_flip_qrp_protocol() {
  static const session::ProtocolInfo info{
      "coin-flip-qrp",
      "Coin flipping over a Blum integer",
      "B bets on the parity of y where z = y^2, y = x^2 mod N",
      {{kQrpCommit, Direction::AtoB, "Set-up", "commitment"},
       {kQrpBet, Direction::BtoA, "Challenge", "bet"},
       {kQrpOpen, Direction::AtoB, "Response", "opening"}},
      "coin outcome and winner",
      "coin outcome and winner",
  };
  return info;
}

void check_qrp_coin_opening(const BigInt& n, const BigInt& z, const BigInt& x, const BigInt& y, const BigInt& p,
                            const BigInt& q) {
  require(p * q == n, "revealed factors do not multiply to N");
  require(p != q && numtheory::is_probable_prime(p) && numtheory::is_probable_prime(q),
          "revealed factors are not two distinct primes");
  require(mod(p, 4) == 3 && mod(q, 4) == 3, "modulus is not a Blum integer (a factor is not 3 mod 4)");
  require(x > 0 && x < n && gcd(x, n) == 1, "x is not a unit mod N");
  require(y == mod(x * x, n), "y is not x^2 mod N");
  require(z == mod(y * y, n), "z is not y^2 mod N");
}

CoinQrpA::CoinQrpA(CoinFlipQrpConfig config, RandomStream rng) : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> CoinQrpA::start() {
  if (config_.modulus) {
    modulus_ = *config_.modulus;
  } else {
    modulus_ = config_.cheat_non_blum ? non_blum_modulus(config_.bits, rng_) : numtheory::gen_blum(config_.bits, rng_);
  }
  const BigInt& n = modulus_->n();
  x_ = config_.x ? mod(*config_.x, n) : numtheory::random_unit(n, rng_);
  y_ = mod(x_ * x_, n);
  z_ = mod(y_ * y_, n);
  ByteWriter w;
  write_int(w, n);
  write_int(w, z_);
  return {make_message(kQrpCommit, std::move(w))};
}

std::vector<Message> CoinQrpA::receive(const Message& m) {
  require(m.tag == kQrpBet, "unexpected message");
  const bool bet = read_bet(m);
  const BigInt revealed_y = config_.cheat_wrong_y ? BigInt(y_ + 1) : y_;
  result_ = settle(is_odd(revealed_y), bet, {x_, revealed_y, modulus_->p(), modulus_->q()});
  finished_ = true;
  ByteWriter w;
  write_int(w, x_);
  write_int(w, revealed_y);
  write_int(w, modulus_->p());
  write_int(w, modulus_->q());
  return {make_message(kQrpOpen, std::move(w))};
}

Bytes CoinQrpA::private_output() const { return result_ ? encode_coin(*result_) : Bytes{}; }

std::string CoinQrpA::summary() const {
  if (!result_) return "incomplete";
  return std::string("coin ") + (result_->outcome ? "odd" : "even") + ", winner " +
         (result_->winner == Winner::A ? "A" : "B");
}

CoinQrpB::CoinQrpB(CoinFlipQrpConfig config, RandomStream rng) : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> CoinQrpB::receive(const Message& m) {
  if (m.tag == kQrpCommit) {
    require(n_ == 0, "commitment sent twice");
    Payload in(m, "commitment");
    n_ = read_int(*in);
    z_ = read_int(*in);
    in.done();
    require(n_ >= 21 && is_odd(n_), "modulus must be odd and at least 21");
    require(z_ < n_ && gcd(z_, n_) == 1, "z is not a unit mod N");
    bet_ = config_.bet ? *config_.bet : rng_.bit();
    return {bet_message(kQrpBet, bet_)};
  }
  require(m.tag == kQrpOpen && n_ != 0, "unexpected message");
  Payload in(m, "opening");
  BigInt x = read_int(*in), y = read_int(*in), p = read_int(*in), q = read_int(*in);
  in.done();
  check_qrp_coin_opening(n_, z_, x, y, p, q);
  result_ = settle(is_odd(y), bet_, {x, y, p, q});
  finished_ = true;
  return {};
}

Bytes CoinQrpB::private_output() const { return result_ ? encode_coin(*result_) : Bytes{}; }

std::string CoinQrpB::summary() const {
  if (!result_) return "incomplete";
  std::string s = std::string("bet ") + (bet_ ? "odd" : "even") + ", coin " + (result_->outcome ? "odd" : "even") +
                  ", winner " + (result_->winner == Winner::A ? "A" : "B") + "; proof x=" +
                  result_->proof_data[0].get_str() + " y=" + result_->proof_data[1].get_str() +
                  " p=" + result_->proof_data[2].get_str() + " q=" + result_->proof_data[3].get_str();
  return s;
}

SessionResult coin_flip_qrp(const CoinFlipQrpConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                            Transport transport) {
  return session::run_session(
      coin_flip_qrp_protocol(), [&](RandomStream r) { return std::make_unique<CoinQrpA>(config, std::move(r)); },
      [&](RandomStream r) { return std::make_unique<CoinQrpB>(config, std::move(r)); }, seed_a, seed_b, transport);
}

session::FunctionalDefinition coin_flip_qrp_definition() {
  return [](const session::PartyMachine& pa, const session::PartyMachine& pb) {
    const auto& a = dynamic_cast<const CoinQrpA&>(pa);
    const auto& b = dynamic_cast<const CoinQrpB&>(pb);
    const Bytes out = encode_coin(settle(is_odd(a.y()), b.bet(), {}));
    return std::pair<Bytes, Bytes>{out, out};
  };
}

void verify_coin_flip_qrp(const session::Transcript& t) {
  protocol::verify_with_cursor(t, coin_flip_qrp_protocol(), [](protocol::TranscriptCursor& c) {
    ByteReader r = c.next(kQrpCommit);
    BigInt n = read_int(r), z = read_int(r);
    r.expect_done("commitment");
    require(n >= 21 && is_odd(n), "modulus must be odd and at least 21");
    require(z < n && gcd(z, n) == 1, "z is not a unit mod N");
    (void)c.next(kQrpBet);
    (void)read_bet(c.current());
    r = c.next(kQrpOpen);
    BigInt x = read_int(r), y = read_int(r), p = read_int(r), q = read_int(r);
    r.expect_done("opening");
    check_qrp_coin_opening(n, z, x, y, p, q);
  });
}

// ----------------------------------------------------------------------------

const session::ProtocolInfo& coin_flip_general_protocol() {
  static const session::ProtocolInfo info{
      "coin-flip-general",
      "Coin flipping with modular exponentiation",
      "A fixes y = g^x; B bets on the parity of x in {0, ..., p-2}",
      {{kGenCommit, Direction::AtoB, "Set-up", "commitment"},
       {kGenBet, Direction::BtoA, "Challenge", "bet"},
       {kGenOpen, Direction::AtoB, "Response", "opening"}},
      "coin outcome and winner",
      "coin outcome and winner",
  };
  return info;
}

CoinGeneralA::CoinGeneralA(CoinFlipGeneralConfig config, RandomStream rng)
    : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> CoinGeneralA::start() {
  field_ = config_.field ? *config_.field : numtheory::gen_field(config_.bits, rng_);
  const BigInt& p = field_->p();
  x_ = config_.x ? *config_.x : rng_.below(BigInt(p - 1));
  if (x_ < 0 || x_ > p - 2) throw InvalidArgument("x must lie in [0, p-2]");
  ByteWriter w;
  protocol::write_field(w, *field_);
  write_int(w, pow_mod(field_->g(), x_, p));
  return {make_message(kGenCommit, std::move(w))};
}

std::vector<Message> CoinGeneralA::receive(const Message& m) {
  require(m.tag == kGenBet, "unexpected message");
  const bool bet = read_bet(m);
  const BigInt opened = config_.cheat_wrong_opening ? mod(x_ + 1, field_->p() - 1) : x_;
  result_ = settle(is_odd(opened), bet, {opened});
  finished_ = true;
  ByteWriter w;
  write_int(w, opened);
  return {make_message(kGenOpen, std::move(w))};
}

Bytes CoinGeneralA::private_output() const { return result_ ? encode_coin(*result_) : Bytes{}; }

std::string CoinGeneralA::summary() const {
  if (!result_) return "incomplete";
  return std::string("coin ") + (result_->outcome ? "odd" : "even") + ", winner " +
         (result_->winner == Winner::A ? "A" : "B");
}

CoinGeneralB::CoinGeneralB(CoinFlipGeneralConfig config, RandomStream rng)
    : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> CoinGeneralB::receive(const Message& m) {
  if (m.tag == kGenCommit) {
    require(!field_, "commitment sent twice");
    Payload in(m, "commitment");
    field_ = protocol::read_field(*in);
    y_ = read_int(*in);
    in.done();
    require(y_ >= 1 && y_ < field_->p(), "y is not an element of Z_p*");
    bet_ = config_.bet ? *config_.bet : rng_.bit();
    return {bet_message(kGenBet, bet_)};
  }
  require(m.tag == kGenOpen && field_, "unexpected message");
  Payload in(m, "opening");
  BigInt x = read_int(*in);
  in.done();
  require(x <= field_->p() - 2, "x outside the domain {0, ..., p-2}");
  require(pow_mod(field_->g(), x, field_->p()) == y_, "g^x does not match the committed y");
  result_ = settle(is_odd(x), bet_, {x});
  finished_ = true;
  return {};
}

Bytes CoinGeneralB::private_output() const { return result_ ? encode_coin(*result_) : Bytes{}; }

std::string CoinGeneralB::summary() const {
  if (!result_) return "incomplete";
  return std::string("bet ") + (bet_ ? "odd" : "even") + ", coin " + (result_->outcome ? "odd" : "even") +
         ", winner " + (result_->winner == Winner::A ? "A" : "B") + "; proof x=" + result_->proof_data[0].get_str();
}

SessionResult coin_flip_general(const CoinFlipGeneralConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                                Transport transport) {
  return session::run_session(
      coin_flip_general_protocol(), [&](RandomStream r) { return std::make_unique<CoinGeneralA>(config, std::move(r)); },
      [&](RandomStream r) { return std::make_unique<CoinGeneralB>(config, std::move(r)); }, seed_a, seed_b, transport);
}

session::FunctionalDefinition coin_flip_general_definition() {
  return [](const session::PartyMachine& pa, const session::PartyMachine& pb) {
    const auto& a = dynamic_cast<const CoinGeneralA&>(pa);
    const auto& b = dynamic_cast<const CoinGeneralB&>(pb);
    const Bytes out = encode_coin(settle(is_odd(a.x()), b.bet(), {}));
    return std::pair<Bytes, Bytes>{out, out};
  };
}

void verify_coin_flip_general(const session::Transcript& t) {
  protocol::verify_with_cursor(t, coin_flip_general_protocol(), [](protocol::TranscriptCursor& c) {
    ByteReader r = c.next(kGenCommit);
    FieldContext field = protocol::read_field(r);
    BigInt y = read_int(r);
    r.expect_done("commitment");
    require(y >= 1 && y < field.p(), "y is not an element of Z_p*");
    (void)c.next(kGenBet);
    (void)read_bet(c.current());
    r = c.next(kGenOpen);
    BigInt x = read_int(r);
    r.expect_done("opening");
    require(x <= field.p() - 2, "x outside the domain {0, ..., p-2}");
    require(pow_mod(field.g(), x, field.p()) == y, "g^x does not match the committed y");
  });
}

}  // namespace tpc::derived
