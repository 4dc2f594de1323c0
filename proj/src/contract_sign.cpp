#include <algorithm>

#include "tpc/derived.hpp"

namespace tpc::derived {

using protocol::make_message;
using protocol::require;
using session::Direction;
using session::Message;
using session::Role;

namespace {

constexpr std::uint8_t kAOffer = 0x81;
constexpr std::uint8_t kBSquare = 0x82;
constexpr std::uint8_t kARoot = 0x83;
constexpr std::uint8_t kBOffer = 0x84;
constexpr std::uint8_t kASquare = 0x85;
constexpr std::uint8_t kBRoot = 0x86;
constexpr std::uint8_t kClose = 0x87;

constexpr int kUnitTries = 64;

ByteWriter with_hash(const Sha256Digest& h) {
  ByteWriter w;
  w.raw(h);
  return w;
}

void check_modulus(const BigInt& n) { require(n >= 15 && mpz_odd_p(n.get_mpz_t()), "modulus must be an odd composite"); }

std::pair<BigInt, BigInt> ordered(const BigInt& a, const BigInt& b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

const session::ProtocolInfo& contract_sign_protocol() {
  static const session::ProtocolInfo info{
      "contract-sign",
      "Contract signing by alternating Rabin OT",
      "Each round transfers A's factors to B and B's factors to A obliviously; signed once both hold them",
      {{kAOffer, Direction::AtoB, "Set-up", "a-offer"},
       {kBSquare, Direction::BtoA, "Challenge", "b-square"},
       {kARoot, Direction::AtoB, "Response", "a-root"},
       {kBOffer, Direction::BtoA, "Set-up", "b-offer"},
       {kASquare, Direction::AtoB, "Challenge", "a-square"},
       {kBRoot, Direction::BtoA, "Response", "b-root"},
       {kClose, Direction::AtoB, "Close", "close"}},
      "signed flag and B's factors, or nothing",
      "signed flag and A's factors, or nothing",
  };
  return info;
}

ContractParty::ContractParty(Role role, ContractSignConfig config, RandomStream rng)
    : Party(std::move(rng)), role_(role), config_(std::move(config)) {
  const std::string& text = role_ == Role::B && config_.b_contract ? *config_.b_contract : config_.contract;
  hash_ = sha256(text);
  const auto& given = role_ == Role::A ? config_.a_modulus : config_.b_modulus;
  own_ = given ? *given : numtheory::gen_modulus(config_.bits, rng_);
}

ByteReader ContractParty::open(const Message& m, const char* what) {
  ByteReader r(m.payload);
  ByteView h = r.raw(hash_.size());
  require(std::equal(h.begin(), h.end(), hash_.begin()), std::string(what) + " is bound to a different contract");
  return r;
}

Message ContractParty::offer() {
  ByteWriter w = with_hash(hash_);
  w.u8(obtained_ ? 1 : 0);
  write_int(w, own_->n());
  return make_message(role_ == Role::A ? kAOffer : kBOffer, std::move(w));
}

Message ContractParty::square_for(const BigInt& n) {
  int tries = 0;
  do {
    require(tries++ < kUnitTries, "no unit x found within the resampling budget");
    x_ = rng_.between(1, n - 1);
  } while (gcd(x_, n) != 1);
  ByteWriter w = with_hash(hash_);
  write_int(w, mod(x_ * x_, n));
  return make_message(role_ == Role::A ? kASquare : kBSquare, std::move(w));
}

Message ContractParty::root_for(ByteReader& r) {
  BigInt square = read_int(r);
  r.expect_done("square");
  require(square < own_->n(), "square is not reduced mod N");
  const auto roots = numtheory::four_square_roots(square, *own_);
  BigInt root = roots[rng_.below(4)];
  if (role_ == Role::A && config_.cheat_a_non_root) {
    root = mod(root + 1, own_->n());
    while (mod(root * root, own_->n()) == square) root = mod(root + 1, own_->n());
  }
  sent_.push_back(root);
  ByteWriter w = with_hash(hash_);
  write_int(w, root);
  return make_message(role_ == Role::A ? kARoot : kBRoot, std::move(w));
}

void ContractParty::absorb_root(ByteReader& r) {
  BigInt root = read_int(r);
  r.expect_done("root");
  require(root < other_n_, "root is not reduced mod N");
  require(mod(root * root, other_n_) == mod(x_ * x_, other_n_), "returned value is not a square root of the challenge");
  roots_.emplace_back(x_, root);
  if (!obtained_ && root != x_ && root != other_n_ - x_) {
    auto [p, q] = numtheory::factor_from_roots(x_, root, other_n_);
    obtained_ = ordered(p, q);
  }
}

Message ContractParty::close() {
  signed_ = obtained_.has_value() && other_done_;
  finished_ = true;
  ByteWriter w = with_hash(hash_);
  w.u8(signed_ ? 1 : 0);
  w.u16(static_cast<std::uint16_t>(rounds_));
  return make_message(kClose, std::move(w));
}

std::vector<Message> ContractParty::start() {
  if (role_ != Role::A) return {};
  if (config_.max_rounds > 0xffff) throw InvalidArgument("too many rounds");
  if (config_.max_rounds == 0) return {close()};
  return {offer()};
}

std::vector<Message> ContractParty::receive(const Message& m) {
  if (role_ == Role::A) {
    switch (m.tag) {
      case kBSquare: {
        ByteReader r = open(m, "b-square");
        return {root_for(r)};
      }
      case kBOffer: {
        ByteReader r = open(m, "b-offer");
        const std::uint8_t done = r.u8();
        BigInt n = read_int(r);
        r.expect_done("b-offer");
        require(done <= 1, "status flag must be 0 or 1");
        check_modulus(n);
        require(other_n_ == 0 || other_n_ == n, "counterpart changed its modulus");
        other_n_ = n;
        other_done_ = done == 1;
        return {square_for(other_n_)};
      }
      case kBRoot: {
        ByteReader r = open(m, "b-root");
        absorb_root(r);
        ++rounds_;
        if ((obtained_ && other_done_) || rounds_ >= config_.max_rounds) return {close()};
        return {offer()};
      }
      default:
        require(false, "unexpected message");
    }
  }
  switch (m.tag) {
    case kAOffer: {
      ByteReader r = open(m, "a-offer");
      const std::uint8_t done = r.u8();
      BigInt n = read_int(r);
      r.expect_done("a-offer");
      require(done <= 1, "status flag must be 0 or 1");
      check_modulus(n);
      require(other_n_ == 0 || other_n_ == n, "counterpart changed its modulus");
      other_n_ = n;
      other_done_ = done == 1;
      return {square_for(other_n_)};
    }
    case kARoot: {
      ByteReader r = open(m, "a-root");
      absorb_root(r);
      return {offer()};
    }
    case kASquare: {
      ByteReader r = open(m, "a-square");
      Message reply = root_for(r);
      ++rounds_;
      return {std::move(reply)};
    }
    case kClose: {
      ByteReader r = open(m, "close");
      const std::uint8_t flag = r.u8();
      const std::size_t rounds = r.u16();
      r.expect_done("close");
      require(flag <= 1, "signed flag must be 0 or 1");
      require(rounds == rounds_, "round count differs from the rounds played");
      require(flag == 0 || obtained_.has_value(), "declared signed although A's factors were not transferred");
      signed_ = flag == 1;
      finished_ = true;
      return {};
    }
    default:
      require(false, "unexpected message");
  }
  return {};
}

Bytes ContractParty::private_output() const {
  ByteWriter w;
  w.u8(signed_ ? 1 : 0);
  w.u8(obtained_ ? 1 : 0);
  if (obtained_) {
    write_int(w, obtained_->first);
    write_int(w, obtained_->second);
  }
  return std::move(w).take();
}

std::string ContractParty::summary() const {
  if (!finished_) return "incomplete after " + std::to_string(rounds_) + " rounds";
  std::string s = std::string(signed_ ? "signed" : "not signed") + " after " + std::to_string(rounds_) + " rounds";
  if (obtained_) s += "; holds counterpart factors " + obtained_->first.get_str() + " * " + obtained_->second.get_str();
  return s;
}

SessionResult contract_sign(const ContractSignConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                            Transport transport) {
  return session::run_session(
      contract_sign_protocol(),
      [&](RandomStream r) { return std::make_unique<ContractParty>(Role::A, config, std::move(r)); },
      [&](RandomStream r) { return std::make_unique<ContractParty>(Role::B, config, std::move(r)); }, seed_a, seed_b,
      transport);
}

session::FunctionalDefinition contract_sign_definition() {
  // Transfer t in each direction succeeds iff the root differs from +-x; the
  // session stops after the first round in which both directions have
  // succeeded at least once.
  return [](const session::PartyMachine& pa, const session::PartyMachine& pb) {
    const auto& a = dynamic_cast<const ContractParty&>(pa);
    const auto& b = dynamic_cast<const ContractParty&>(pb);
    auto success = [](const BigInt& x, const BigInt& r, const BigInt& n) { return r != x && r != n - x; };
    bool a_got = false, b_got = false;
    const std::size_t rounds = std::min(a.received_roots().size(), b.received_roots().size());
    for (std::size_t t = 0; t < rounds; ++t) {
      b_got = b_got || success(b.received_roots()[t].first, a.sent_roots()[t], a.own_modulus().n());
      a_got = a_got || success(a.received_roots()[t].first, b.sent_roots()[t], b.own_modulus().n());
    }
    const bool done = a_got && b_got;
    auto encode = [&](bool got, const BlumModulus& m) {
      ByteWriter w;
      w.u8(done ? 1 : 0);
      w.u8(got ? 1 : 0);
      if (got) {
        auto [p, q] = ordered(m.p(), m.q());
        write_int(w, p);
        write_int(w, q);
      }
      return std::move(w).take();
    };
    return std::pair<Bytes, Bytes>{encode(a_got, b.own_modulus()), encode(b_got, a.own_modulus())};
  };
}

void verify_contract_sign(const session::Transcript& t, const std::string& contract_hash) {
  const Bytes expected = from_hex(contract_hash);
  if (expected.size() != 32) throw FramingError("contract hash must be 32 bytes");
  protocol::verify_with_cursor(t, contract_sign_protocol(), [&](protocol::TranscriptCursor& c) {
    auto open = [&](std::uint8_t tag) {
      ByteReader r = c.next(tag);
      ByteView h = r.raw(32);
      require(std::equal(h.begin(), h.end(), expected.begin()), "message is bound to a different contract");
      return r;
    };
    BigInt na = 0, nb = 0;
    std::size_t rounds = 0;
    bool a_done = false, b_done = false;
    auto transfer = [&](std::uint8_t offer, std::uint8_t square, std::uint8_t root, BigInt& n, bool& done) {
      ByteReader r = open(offer);
      const std::uint8_t flag = r.u8();
      BigInt nn = read_int(r);
      r.expect_done("offer");
      require(flag <= 1, "status flag must be 0 or 1");
      check_modulus(nn);
      require(n == 0 || n == nn, "party changed its modulus");
      n = nn;
      done = flag == 1;
      r = open(square);
      BigInt sq = read_int(r);
      r.expect_done("square");
      require(sq < n && gcd(sq, n) == 1, "challenge is not a unit mod N");
      r = open(root);
      BigInt rt = read_int(r);
      r.expect_done("root");
      require(rt < n && mod(rt * rt, n) == sq, "returned value is not a square root of the challenge");
    };
    while (c.peek_tag() == kAOffer) {
      transfer(kAOffer, kBSquare, kARoot, na, a_done);
      transfer(kBOffer, kASquare, kBRoot, nb, b_done);
      ++rounds;
    }
    ByteReader r = open(kClose);
    const std::uint8_t flag = r.u8();
    const std::size_t declared = r.u16();
    r.expect_done("close");
    require(flag <= 1, "signed flag must be 0 or 1");
    require(declared == rounds, "close declares a different round count");
    require(flag == 0 || b_done, "declared signed although B reported no transfer");
  });
}

}  // namespace tpc::derived
