#include <algorithm>

#include "tpc/oblivious.hpp"

namespace tpc::oblivious {

using protocol::make_message;
using protocol::Payload;
using protocol::require;
using session::Direction;
using session::Message;

namespace {

constexpr std::uint8_t kModulus = 0x01;
constexpr std::uint8_t kSquare = 0x02;
constexpr std::uint8_t kRoot = 0x03;

// Resampling budget for a unit x (each draw fails with probability < 1/2 for odd N).
constexpr int kUnitTries = 64;

}  // namespace

const session::ProtocolInfo& rabin_ot_protocol() {
  static const session::ProtocolInfo info{
      "rabin-ot",
      "Rabin oblivious transfer",
      "Sender transfers the factorization of N; receiver gets it with probability 1/2",
      {{kModulus, Direction::AtoB, "Set-up", "modulus"},
       {kSquare, Direction::BtoA, "Challenge", "square"},
       {kRoot, Direction::AtoB, "Response", "root"}},
      "nothing",
      "factors (p, q) of N, or nothing",
  };
  return info;
}

RabinOtSender::RabinOtSender(RabinOtConfig config, RandomStream rng)
    : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> RabinOtSender::start() {
  modulus_ = config_.modulus ? *config_.modulus : numtheory::gen_modulus(config_.bits, rng_);
  ByteWriter w;
  write_int(w, modulus_->n());
  return {make_message(kModulus, std::move(w))};
}

std::vector<Message> RabinOtSender::receive(const Message& m) {
  require(m.tag == kSquare, "unexpected message");
  Payload in(m, "square");
  BigInt square = read_int(*in);
  in.done();
  require(square < modulus_->n(), "square is not reduced mod N");
  // Throws FactorLeak or NotAResidue on a malformed challenge.
  const auto roots = numtheory::four_square_roots(square, *modulus_);
  if (config_.forced_root) {
    root_ = *config_.forced_root;
  } else {
    const std::size_t idx = config_.root_index ? *config_.root_index % 4 : rng_.below(4);
    root_ = roots[idx];
  }
  finished_ = true;
  ByteWriter w;
  write_int(w, *root_);
  return {make_message(kRoot, std::move(w))};
}

std::string RabinOtSender::summary() const {
  return modulus_ ? "sent N=" + modulus_->n().get_str() : std::string("no modulus");
}

RabinOtReceiver::RabinOtReceiver(RabinOtConfig config, RandomStream rng)
    : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> RabinOtReceiver::receive(const Message& m) {
  if (m.tag == kModulus) {
    require(n_ == 0, "modulus sent twice");
    Payload in(m, "modulus");
    n_ = read_int(*in);
    in.done();
    require(n_ >= 15 && mpz_odd_p(n_.get_mpz_t()), "modulus must be an odd composite");
    if (config_.receiver_x) {
      x_ = mod(*config_.receiver_x, n_);
      require(gcd(x_, n_) == 1, "x shares a factor with N");
    } else {
      int tries = 0;
      do {
        require(tries++ < kUnitTries, "no unit x found within the resampling budget");
        x_ = rng_.between(1, n_ - 1);
      } while (gcd(x_, n_) != 1);
    }
    ByteWriter w;
    write_int(w, mod(x_ * x_, n_));
    return {make_message(kSquare, std::move(w))};
  }
  require(m.tag == kRoot && n_ != 0, "unexpected message");
  Payload in(m, "root");
  BigInt r = read_int(*in);
  in.done();
  require(r < n_, "root is not reduced mod N");
  require(mod(r * r, n_) == mod(x_ * x_, n_), "returned value is not a square root of the challenge");
  if (r != x_ && r != n_ - x_) factors_ = numtheory::factor_from_roots(x_, r, n_);
  if (factors_ && factors_->first > factors_->second) std::swap(factors_->first, factors_->second);
  finished_ = true;
  return {};
}

Bytes RabinOtReceiver::private_output() const {
  ByteWriter w;
  w.u8(factors_ ? 1 : 0);
  if (factors_) {
    write_int(w, factors_->first);
    write_int(w, factors_->second);
  }
  return std::move(w).take();
}

std::string RabinOtReceiver::summary() const {
  if (!finished_) return "incomplete";
  return factors_ ? "obtained factors " + factors_->first.get_str() + " * " + factors_->second.get_str()
                  : std::string("learned nothing");
}

SessionResult rabin_ot(const RabinOtConfig& config, std::uint64_t seed_a, std::uint64_t seed_b, Transport transport) {
  return session::run_session(
      rabin_ot_protocol(), [&](RandomStream r) { return std::make_unique<RabinOtSender>(config, std::move(r)); },
      [&](RandomStream r) { return std::make_unique<RabinOtReceiver>(config, std::move(r)); }, seed_a, seed_b,
      transport);
}

session::FunctionalDefinition rabin_ot_definition() {
  return [](const session::PartyMachine& pa, const session::PartyMachine& pb) {
    const auto& a = dynamic_cast<const RabinOtSender&>(pa);
    const auto& b = dynamic_cast<const RabinOtReceiver&>(pb);
    const BigInt& n = a.modulus().n();
    const BigInt& r = *a.sent_root();
    ByteWriter w;
    if (r != b.x() && r != n - b.x()) {
      w.u8(1);
      write_int(w, std::min(a.modulus().p(), a.modulus().q()));
      write_int(w, std::max(a.modulus().p(), a.modulus().q()));
    } else {
      w.u8(0);
    }
    return std::pair<Bytes, Bytes>{Bytes{}, std::move(w).take()};
  };
}

void verify_rabin_ot(const session::Transcript& t) {
  protocol::verify_with_cursor(t, rabin_ot_protocol(), [](protocol::TranscriptCursor& c) {
    ByteReader r = c.next(kModulus);
    BigInt n = read_int(r);
    r.expect_done("modulus");
    require(n >= 15 && mpz_odd_p(n.get_mpz_t()), "modulus must be an odd composite");
    r = c.next(kSquare);
    BigInt square = read_int(r);
    r.expect_done("square");
    require(square < n && gcd(square, n) == 1, "challenge is not a unit mod N");
    r = c.next(kRoot);
    BigInt root = read_int(r);
    r.expect_done("root");
    require(root < n && mod(root * root, n) == square, "returned value is not a square root of the challenge");
  });
}

}  // namespace tpc::oblivious
