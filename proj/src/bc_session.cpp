#include "tpc/commitment.hpp"

namespace tpc::commitment {

using protocol::make_message;
using protocol::Payload;
using protocol::require;
using session::Direction;
using session::Message;

namespace {

constexpr std::uint8_t kSetup = 0xA0;
constexpr std::uint8_t kCommit = 0xA1;
constexpr std::uint8_t kReceipt = 0xA2;
constexpr std::uint8_t kOpen = 0xA3;
constexpr std::uint8_t kVerdict = 0xA4;
constexpr std::uint8_t kQnrChallenge = 0xA5;
constexpr std::uint8_t kQnrAnswer = 0xA6;

session::TagCatalog bc_tags(bool qnr) {
  if (!qnr)
    return {{kSetup, Direction::AtoB, "Set-up", "parameters"},
            {kCommit, Direction::AtoB, "Commitment", "commitment"},
            {kReceipt, Direction::BtoA, "Commitment", "receipt"},
            {kOpen, Direction::AtoB, "Opening", "opening"},
            {kVerdict, Direction::BtoA, "Verification", "verdict"}};
  return {{kSetup, Direction::AtoB, "Set-up", "parameters"},
          {kQnrChallenge, Direction::BtoA, "Challenge", "non-residue-challenge"},
          {kQnrAnswer, Direction::AtoB, "Response", "non-residue-answer"},
          {kCommit, Direction::AtoB, "Commitment", "commitment"},
          {kReceipt, Direction::BtoA, "Commitment", "receipt"},
          {kOpen, Direction::AtoB, "Opening", "opening"},
          {kVerdict, Direction::BtoA, "Verification", "verdict"}};
}

void write_blob(ByteWriter& w, ByteView b) {
  w.u32(static_cast<std::uint32_t>(b.size()));
  w.raw(b);
}

Bytes read_blob(ByteReader& r) {
  const std::size_t n = r.u32();
  ByteView v = r.raw(n);
  return Bytes(v.begin(), v.end());
}

/// Public checks on the parameters before anything is committed.
void check_params(Scheme s, const Bytes& params) {
  ByteReader r(params);
  switch (s) {
    case Scheme::Qrp: {
      const BigInt n = read_int(r);
      const BigInt y = read_int(r);
      r.expect_done("qrp parameters");
      require(n >= 15 && mpz_odd_p(n.get_mpz_t()), "N must be an odd composite");
      require(y > 0 && y < n && numtheory::jacobi(y, n) == 1, "y must have Jacobi symbol 1");
      return;
    }
    case Scheme::Dlp:
      (void)protocol::read_field(r);
      r.expect_done("dlp parameters");
      return;
    case Scheme::Graph: {
      const Graph g = graphs::read_graph(r);
      const Graph h = graphs::read_graph(r);
      r.expect_done("graph parameters");
      require(g.size() == h.size() && g.degree_sequence() != h.degree_sequence(),
              "graph pair lacks a degree-sequence non-isomorphism certificate");
      return;
    }
  }
  require(false, "unknown scheme");
}

std::pair<BigInt, BigInt> qrp_params(const Bytes& params) {
  ByteReader r(params);
  BigInt n = read_int(r);
  BigInt y = read_int(r);
  return {n, y};
}

const session::ProtocolInfo& make_info(const char* id, const char* title, const char* reference, bool qnr) {
  static std::vector<std::unique_ptr<session::ProtocolInfo>> store;
  store.push_back(std::make_unique<session::ProtocolInfo>(
      session::ProtocolInfo{id, title, reference, bc_tags(qnr), "nothing", "the committed value"}));
  return *store.back();
}

}  // namespace

const session::ProtocolInfo& bc_qrp_protocol() {
  static const auto& info = make_info("bc-qrp", "Bit commitment by quadratic residuosity",
                                      "c = r^2 y^b mod N; the opening reveals b, r and the factors of N", false);
  return info;
}

const session::ProtocolInfo& bc_qrp_qnr_protocol() {
  static const auto& info =
      make_info("bc-qrp-qnr", "Bit commitment by quadratic residuosity, factors kept",
                "A first answers residuosity challenges on r^2 y^beta to show y is a non-residue; the opening reveals b and r",
                true);
  return info;
}

const session::ProtocolInfo& bc_dlp_protocol() {
  static const auto& info = make_info("bc-dlp", "Commitment to an exponent by discrete logarithm",
                                      "y = g^x mod p for a certified generator g; the opening reveals x", false);
  return info;
}

const session::ProtocolInfo& bc_graph_protocol() {
  static const auto& info = make_info("bc-graph", "Bit commitment by graph isomorphism",
                                      "A relabeled copy of G (b = 0) or H (b = 1); the opening reveals b and the relabeling",
                                      false);
  return info;
}

const session::ProtocolInfo& bc_protocol(const BcConfig& config) {
  switch (config.scheme) {
    case Scheme::Qrp:
      return config.qnr_proof ? bc_qrp_qnr_protocol() : bc_qrp_protocol();
    case Scheme::Dlp:
      return bc_dlp_protocol();
    case Scheme::Graph:
      return bc_graph_protocol();
  }
  throw InvalidArgument("unknown scheme");
}

BcCommitter::BcCommitter(BcConfig config, RandomStream rng) : Party(std::move(rng)), config_(std::move(config)) {
  if (config_.qnr_proof && config_.scheme != Scheme::Qrp) throw InvalidArgument("the non-residue proof applies to qrp only");
  if (config_.qnr_proof && (config_.qnr_rounds == 0 || config_.qnr_rounds > 0xffff))
    throw InvalidArgument("non-residue rounds must be in [1, 65535]");
}

Message BcCommitter::commitment_message() {
  ByteWriter w;
  write_blob(w, commitment_->witness);
  return make_message(kCommit, std::move(w));
}

std::vector<Message> BcCommitter::start() {
  switch (config_.scheme) {
    case Scheme::Qrp: {
      value_ = config_.value ? *config_.value : BigInt(rng_.bit() ? 1 : 0);
      if (value_ != 0 && value_ != 1) throw InvalidArgument("committed value must be a bit");
      if (config_.cheat_residue_y) {
        BlumModulus m = config_.modulus ? *config_.modulus : numtheory::gen_blum(config_.bits, rng_);
        const BigInt s = numtheory::random_unit(m.n(), rng_);
        BigInt y = mod(s * s, m.n());
        qrp_ = QrpCommitter::unchecked(std::move(m), std::move(y));
      } else if (config_.modulus) {
        qrp_ = QrpCommitter(*config_.modulus,
                            config_.y ? *config_.y : numtheory::sample_nonresidue_jacobi1(*config_.modulus, rng_));
      } else {
        qrp_ = QrpCommitter::generate(config_.bits, rng_);
      }
      commitment_ = qrp_->commit(value_ == 1, rng_);
      break;
    }
    case Scheme::Dlp: {
      field_ = config_.field ? *config_.field : numtheory::gen_field(config_.bits, rng_);
      value_ = config_.value ? *config_.value : rng_.between(2, field_->p() - 2);
      commitment_ = dlp_commit(value_, *field_);
      opening_ = dlp_open(value_);
      break;
    }
    case Scheme::Graph: {
      const auto pair = config_.graphs ? *config_.graphs : graphs::gen_noniso_pair(config_.n, rng_);
      value_ = config_.value ? *config_.value : BigInt(rng_.bit() ? 1 : 0);
      if (value_ != 0 && value_ != 1) throw InvalidArgument("committed value must be a bit");
      graph_ = graph_commit(value_ == 1, pair.first, pair.second, rng_);
      commitment_ = graph_->commitment;
      opening_ = graph_->opening;
      break;
    }
  }
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(config_.scheme));
  w.u8(config_.qnr_proof ? 1 : 0);
  w.u16(static_cast<std::uint16_t>(config_.qnr_proof ? config_.qnr_rounds : 0));
  write_blob(w, commitment_->public_params);
  std::vector<Message> out{make_message(kSetup, std::move(w))};
  if (!config_.qnr_proof) out.push_back(commitment_message());
  return out;
}

std::vector<Message> BcCommitter::receive(const Message& m) {
  if (m.tag == kQnrChallenge) {
    require(config_.qnr_proof && qnr_answered_ < config_.qnr_rounds, "unexpected message");
    Payload in(m, "non-residue-challenge");
    require(in->u16() == qnr_answered_, "challenge round out of order");
    const BigInt w = read_int(*in);
    in.done();
    require(w > 0 && w < qrp_->modulus().n() && gcd(w, qrp_->modulus().n()) == 1, "challenge is not a unit mod N");
    const bool bit = config_.cheat_residue_y ? rng_.bit() : !numtheory::is_qr(w, qrp_->modulus());
    ByteWriter a;
    a.u16(static_cast<std::uint16_t>(qnr_answered_));
    a.u8(bit ? 1 : 0);
    std::vector<Message> out{make_message(kQnrAnswer, std::move(a))};
    if (++qnr_answered_ == config_.qnr_rounds) out.push_back(commitment_message());
    return out;
  }
  if (m.tag == kReceipt) {
    require(commitment_.has_value() && (!config_.qnr_proof || qnr_answered_ == config_.qnr_rounds), "unexpected message");
    Payload in(m, "receipt");
    in.done();
    Opening o;
    if (config_.scheme == Scheme::Qrp) {
      if (config_.qnr_proof) {
        const auto [b, r] = qrp_->open_without_factors();
        ByteWriter rw;
        write_int(rw, r);
        o = Opening{b ? 1 : 0, std::move(rw).take()};
      } else {
        o = qrp_->open();
      }
    } else {
      o = *opening_;
    }
    if (config_.cheat_flip_opening) o.value = config_.scheme == Scheme::Dlp ? BigInt(o.value + 1) : BigInt(1 - o.value);
    ByteWriter w;
    write_int(w, o.value);
    write_blob(w, o.randomness);
    return {make_message(kOpen, std::move(w))};
  }
  require(m.tag == kVerdict, "unexpected message");
  Payload in(m, "verdict");
  const std::uint8_t v = in->u8();
  in.done();
  require(v == 1, "verdict byte must be 1");
  finished_ = true;
  return {};
}

std::string BcCommitter::summary() const {
  std::string s = std::string("committed ") + (config_.scheme == Scheme::Dlp ? "x=" : "b=") + value_.get_str();
  if (config_.qnr_proof) s += ", answered " + std::to_string(qnr_answered_) + " non-residue challenges";
  return finished_ ? s + ", opening accepted" : s;
}

BcReceiver::BcReceiver(BcConfig config, RandomStream rng) : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> BcReceiver::next_qnr_challenge() {
  const auto [n, y] = qrp_params(params_);
  const BigInt r = numtheory::random_unit(n, rng_);
  qnr_bit_ = rng_.bit() ? 1 : 0;
  BigInt w = mod(r * r, n);
  if (qnr_bit_) w = mod(w * y, n);
  ByteWriter out;
  out.u16(static_cast<std::uint16_t>(qnr_round_));
  write_int(out, w);
  return {make_message(kQnrChallenge, std::move(out))};
}

std::vector<Message> BcReceiver::receive(const Message& m) {
  if (m.tag == kSetup) {
    require(params_.empty(), "set-up sent twice");
    Payload in(m, "parameters");
    const std::uint8_t scheme = in->u8();
    const std::uint8_t qnr = in->u8();
    qnr_rounds_ = in->u16();
    params_ = read_blob(*in);
    in.done();
    require(scheme == static_cast<std::uint8_t>(config_.scheme), "scheme differs from the agreed one");
    require(qnr == (config_.qnr_proof ? 1 : 0), "non-residue proof flag differs from the agreed one");
    require(!config_.qnr_proof || qnr_rounds_ >= 1, "non-residue proof needs at least one round");
    require(config_.qnr_proof || qnr_rounds_ == 0, "unexpected non-residue rounds");
    scheme_ = config_.scheme;
    check_params(scheme_, params_);
    if (config_.qnr_proof) return next_qnr_challenge();
    return {};
  }
  if (m.tag == kQnrAnswer) {
    require(qnr_bit_ >= 0, "unexpected message");
    Payload in(m, "non-residue-answer");
    require(in->u16() == qnr_round_, "answer round out of order");
    const std::uint8_t bit = in->u8();
    in.done();
    require(bit == qnr_bit_, "wrong residuosity answer: y is not shown to be a non-residue");
    qnr_bit_ = -1;
    if (++qnr_round_ < qnr_rounds_) return next_qnr_challenge();
    return {};
  }
  if (m.tag == kCommit) {
    require(!params_.empty() && !commitment_ && qnr_round_ == qnr_rounds_, "unexpected message");
    Payload in(m, "commitment");
    Bytes witness = read_blob(*in);
    in.done();
    commitment_ = Commitment{scheme_, params_, std::move(witness)};
    return {make_message(kReceipt, ByteWriter{})};
  }
  require(m.tag == kOpen && commitment_ && !opened_, "unexpected message");
  Payload in(m, "opening");
  Opening o;
  o.value = read_int(*in);
  o.randomness = read_blob(*in);
  in.done();
  CheckResult check;
  if (config_.qnr_proof) {
    ByteReader rr(o.randomness);
    const BigInt r = read_int(rr);
    rr.expect_done("opening randomness");
    require(o.value == 0 || o.value == 1, "committed value is not a bit");
    check = verify_qrp_without_factors(*commitment_, o.value == 1, r);
  } else {
    check = verify(*commitment_, o);
  }
  require(check.ok, "opening rejected: " + check.diagnostic);
  opened_ = o.value;
  finished_ = true;
  ByteWriter w;
  w.u8(1);
  return {make_message(kVerdict, std::move(w))};
}

Bytes BcReceiver::private_output() const {
  if (!opened_) return {};
  return encode_value(config_.scheme, *opened_);
}

std::string BcReceiver::summary() const {
  if (!opened_) return commitment_ ? "holds a commitment, not opened" : "incomplete";
  return std::string("opened ") + (config_.scheme == Scheme::Dlp ? "x=" : "b=") + opened_->get_str() + ", verified";
}

session::SessionResult bit_commitment(const BcConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                                      session::Transport transport) {
  return session::run_session(
      bc_protocol(config), [&](RandomStream r) { return std::make_unique<BcCommitter>(config, std::move(r)); },
      [&](RandomStream r) { return std::make_unique<BcReceiver>(config, std::move(r)); }, seed_a, seed_b, transport);
}

session::FunctionalDefinition bit_commitment_definition() {
  return [](const session::PartyMachine& pa, const session::PartyMachine&) {
    const auto& a = dynamic_cast<const BcCommitter&>(pa);
    return std::pair<Bytes, Bytes>{Bytes{}, encode_value(a.scheme(), a.value())};
  };
}

void verify_bit_commitment(const session::Transcript& t, const session::ProtocolInfo& info) {
  protocol::verify_with_cursor(t, info, [&](protocol::TranscriptCursor& c) {
    ByteReader r = c.next(kSetup);
    const std::uint8_t scheme_byte = r.u8();
    const std::uint8_t qnr = r.u8();
    const std::size_t rounds = r.u16();
    const Bytes params = read_blob(r);
    r.expect_done("parameters");
    require(scheme_byte >= 1 && scheme_byte <= 3, "unknown scheme");
    const Scheme scheme = static_cast<Scheme>(scheme_byte);
    const bool expect_qnr = &info == &bc_qrp_qnr_protocol();
    require(qnr == (expect_qnr ? 1 : 0), "non-residue proof flag does not match the protocol");
    require(expect_qnr ? rounds >= 1 : rounds == 0, "non-residue round count does not match the protocol");
    require(scheme == (&info == &bc_dlp_protocol() ? Scheme::Dlp
                       : &info == &bc_graph_protocol() ? Scheme::Graph
                                                       : Scheme::Qrp),
            "scheme does not match the protocol");
    check_params(scheme, params);
    for (std::size_t i = 0; i < rounds; ++i) {
      r = c.next(kQnrChallenge);
      require(r.u16() == i, "challenge round out of order");
      (void)read_int(r);
      r.expect_done("non-residue-challenge");
      r = c.next(kQnrAnswer);
      require(r.u16() == i, "answer round out of order");
      require(r.u8() <= 1, "answer must be a bit");
      r.expect_done("non-residue-answer");
    }
    r = c.next(kCommit);
    Commitment cm{scheme, params, read_blob(r)};
    r.expect_done("commitment");
    r = c.next(kReceipt);
    r.expect_done("receipt");
    r = c.next(kOpen);
    Opening o;
    o.value = read_int(r);
    o.randomness = read_blob(r);
    r.expect_done("opening");
    CheckResult check;
    if (expect_qnr) {
      ByteReader rr(o.randomness);
      const BigInt rv = read_int(rr);
      rr.expect_done("opening randomness");
      require(o.value == 0 || o.value == 1, "committed value is not a bit");
      check = verify_qrp_without_factors(cm, o.value == 1, rv);
    } else {
      check = verify(cm, o);
    }
    require(check.ok, "opening rejected: " + check.diagnostic);
    r = c.next(kVerdict);
    require(r.u8() == 1, "verdict byte must be 1");
    r.expect_done("verdict");
  });
}

}  // namespace tpc::commitment
