#include "tpc/zkproof.hpp"

#include "tpc/errors.hpp"

namespace tpc::zkproof {

using protocol::make_message;
using protocol::Payload;
using protocol::require;
using session::Direction;
using session::Message;
using session::Role;

namespace {

constexpr std::uint8_t kQrpBase = 0xB0;
constexpr std::uint8_t kGraphBase = 0xC0;

enum Offset : std::uint8_t { kSetup = 0, kCommit = 1, kChallenge = 2, kResponse = 3, kResult = 4 };

session::TagCatalog round_tags(std::uint8_t base) {
  return {{static_cast<std::uint8_t>(base + kSetup), Direction::AtoB, "Set-up", "statement"},
          {static_cast<std::uint8_t>(base + kCommit), Direction::AtoB, "Commitment", "commitment"},
          {static_cast<std::uint8_t>(base + kChallenge), Direction::BtoA, "Challenge", "challenge"},
          {static_cast<std::uint8_t>(base + kResponse), Direction::AtoB, "Response", "response"},
          {static_cast<std::uint8_t>(base + kResult), Direction::BtoA, "Verification", "round-result"}};
}

const session::ProtocolInfo& make_info(const char* id, const char* title, const char* reference, std::uint8_t base) {
  static std::vector<std::unique_ptr<session::ProtocolInfo>> store;
  store.push_back(std::make_unique<session::ProtocolInfo>(
      session::ProtocolInfo{id, title, reference, round_tags(base), "nothing", "accept or reject, with the failed round"}));
  return *store.back();
}

Bytes rest(ByteReader& r) {
  ByteView v = r.raw(r.remaining());
  return Bytes(v.begin(), v.end());
}

Bytes one_int(const BigInt& v) {
  ByteWriter w;
  write_int(w, v);
  return std::move(w).take();
}

BigInt parse_int(ByteView b) {
  ByteReader r(b);
  BigInt v = read_int(r);
  r.expect_done("integer");
  return v;
}

std::uint8_t challenge_of(const Message& m) {
  require(m.payload.size() == 1 && m.payload[0] <= 1, "challenge must be one byte holding 0 or 1");
  return m.payload[0];
}

std::pair<std::size_t, bool> read_result(ByteReader& r) {
  const std::size_t round = r.u8();
  const std::uint8_t passed = r.u8();
  require(passed <= 1, "round result must be 0 or 1");
  return {round, passed == 1};
}

// QRP ----------------------------------------------------------------------

class QrpChecker : public RoundChecker {
 public:
  QrpChecker(BigInt n, BigInt v) : n_(std::move(n)), v_(std::move(v)) {}
  std::optional<std::string> check(ByteView commitment, bool c, ByteView response) const override {
    BigInt a, y;
    try {
      a = parse_int(commitment);
    } catch (const Error&) {
      return "malformed commitment";
    }
    try {
      y = parse_int(response);
    } catch (const Error&) {
      return "malformed response";
    }
    if (a >= n_ || y >= n_) return "values not reduced mod N";
    if (y == 0) return "y = 0";
    if (mod(y * y, n_) != mod(c ? BigInt(a * v_) : a, n_)) return "y^2 != a v^c mod N";
    return std::nullopt;
  }

 private:
  BigInt n_, v_;
};

class QrpProver : public RoundProver {
 public:
  explicit QrpProver(QrpIdentity id) : id_(std::move(id)) {}
  Bytes statement() const override { return qrp_statement(id_.n, id_.v); }
  Bytes commit(RandomStream& rng) override {
    x_ = numtheory::random_unit(id_.n, rng);
    return one_int(mod(x_ * x_, id_.n));
  }
  Bytes respond(bool c) override { return one_int(c ? mod(x_ * id_.s, id_.n) : x_); }
  bool can_answer(bool) const override { return true; }
  std::unique_ptr<RoundProver> clone() const override { return std::make_unique<QrpProver>(*this); }

 private:
  QrpIdentity id_;
  BigInt x_;
};

class QrpCheatProver : public RoundProver {
 public:
  QrpCheatProver(BigInt n, BigInt v) : n_(std::move(n)), v_(std::move(v)) {}
  Bytes statement() const override { return qrp_statement(n_, v_); }
  Bytes commit(RandomStream& rng) override {
    guess_ = rng.bit();
    x_ = numtheory::random_unit(n_, rng);
    BigInt a = mod(x_ * x_, n_);
    if (guess_) a = mod(a * numtheory::inverse_mod(v_, n_), n_);
    return one_int(a);
  }
  Bytes respond(bool) override { return one_int(x_); }
  bool can_answer(bool c) const override { return c == guess_ || v_ == 1; }
  std::unique_ptr<RoundProver> clone() const override { return std::make_unique<QrpCheatProver>(*this); }

 private:
  BigInt n_, v_, x_;
  bool guess_ = false;
};

class QrpSimulator : public RoundSimulator {
 public:
  QrpSimulator(BigInt n, BigInt v) : n_(std::move(n)), v_(std::move(v)) {}
  std::pair<Bytes, Bytes> fake(bool guess, RandomStream& rng) const override {
    const BigInt y = numtheory::random_unit(n_, rng);
    BigInt a = mod(y * y, n_);
    if (guess) a = mod(a * numtheory::inverse_mod(v_, n_), n_);
    return {one_int(a), one_int(y)};
  }

 private:
  BigInt n_, v_;
};

// Graph --------------------------------------------------------------------

class GraphChecker : public RoundChecker {
 public:
  explicit GraphChecker(Graph g) : g_(std::move(g)) {}
  std::optional<std::string> check(ByteView commitment, bool c, ByteView response) const override {
    std::optional<Graph> copy;
    try {
      ByteReader r(commitment);
      copy = graphs::read_graph(r);
      r.expect_done("committed graph");
    } catch (const Error&) {
      return "malformed commitment";
    }
    if (copy->size() != g_.size()) return "committed graph has the wrong number of vertices";
    try {
      ByteReader r(response);
      if (!c) {
        const graphs::Permutation pi = graphs::read_perm(r);
        r.expect_done("permutation");
        if (pi.size() != g_.size() || graphs::apply_perm(g_, pi) != *copy) return "permutation does not map G to G'";
      } else {
        const auto cycle = graphs::read_vertices(r);
        r.expect_done("cycle");
        if (!graphs::is_hamiltonian_cycle(*copy, cycle)) return "revealed order is not a Hamiltonian cycle of G'";
      }
    } catch (const Error&) {
      return "malformed response";
    }
    return std::nullopt;
  }

 private:
  Graph g_;
};

Bytes graph_bytes(const Graph& g) {
  ByteWriter w;
  graphs::write_graph(w, g);
  return std::move(w).take();
}

Bytes perm_bytes(const graphs::Permutation& pi) {
  ByteWriter w;
  graphs::write_perm(w, pi);
  return std::move(w).take();
}

Bytes cycle_bytes(const std::vector<graphs::Vertex>& c) {
  ByteWriter w;
  graphs::write_vertices(w, c);
  return std::move(w).take();
}

/// Deliberately unanswerable reply: an empty sequence.
Bytes empty_reply() {
  ByteWriter w;
  w.u16(0);
  return std::move(w).take();
}

/// Fresh graph with a planted cycle and the same vertex and edge counts as g, randomly labeled.
PlantedSolution lookalike(const Graph& g, RandomStream& rng) {
  const std::size_t extra = g.edge_count() > g.size() ? g.edge_count() - g.size() : 0;
  PlantedSolution fake = graphs::gen_hamiltonian_graph(g.size(), extra, rng);
  const graphs::Permutation sigma = graphs::random_perm(g.size(), rng);
  return {graphs::apply_perm(fake.graph, sigma), graphs::map_vertices(sigma, fake.witness)};
}

class GraphProver : public RoundProver {
 public:
  explicit GraphProver(PlantedSolution p) : planted_(std::move(p)) {}
  Bytes statement() const override { return graph_statement(planted_.graph); }
  Bytes commit(RandomStream& rng) override {
    pi_ = graphs::random_perm(planted_.graph.size(), rng);
    return graph_bytes(graphs::apply_perm(planted_.graph, *pi_));
  }
  Bytes respond(bool c) override {
    return c ? cycle_bytes(graphs::map_vertices(*pi_, planted_.witness)) : perm_bytes(*pi_);
  }
  bool can_answer(bool) const override { return true; }
  std::unique_ptr<RoundProver> clone() const override { return std::make_unique<GraphProver>(*this); }

 private:
  PlantedSolution planted_;
  std::optional<graphs::Permutation> pi_;
};

class GraphCheatProver : public RoundProver {
 public:
  explicit GraphCheatProver(Graph g) : g_(std::move(g)) {}
  Bytes statement() const override { return graph_statement(g_); }
  Bytes commit(RandomStream& rng) override {
    guess_ = rng.bit();
    if (!guess_) {
      pi_ = graphs::random_perm(g_.size(), rng);
      return graph_bytes(graphs::apply_perm(g_, *pi_));
    }
    fake_ = lookalike(g_, rng);
    return graph_bytes(fake_->graph);
  }
  Bytes respond(bool c) override {
    if (c != guess_) return empty_reply();
    return c ? cycle_bytes(fake_->witness) : perm_bytes(*pi_);
  }
  bool can_answer(bool c) const override { return c == guess_; }
  std::unique_ptr<RoundProver> clone() const override { return std::make_unique<GraphCheatProver>(*this); }

 private:
  Graph g_;
  bool guess_ = false;
  std::optional<graphs::Permutation> pi_;
  std::optional<PlantedSolution> fake_;
};

class GraphSimulator : public RoundSimulator {
 public:
  explicit GraphSimulator(Graph g) : g_(std::move(g)) {}
  std::pair<Bytes, Bytes> fake(bool guess, RandomStream& rng) const override {
    if (!guess) {
      const graphs::Permutation pi = graphs::random_perm(g_.size(), rng);
      return {graph_bytes(graphs::apply_perm(g_, pi)), perm_bytes(pi)};
    }
    const PlantedSolution f = lookalike(g_, rng);
    return {graph_bytes(f.graph), cycle_bytes(f.witness)};
  }

 private:
  Graph g_;
};

}  // namespace

// Identities and verdicts -----------------------------------------------------

QrpIdentity make_qrp_identity(const BigInt& n, const BigInt& s) {
  if (n < 3) throw InvalidArgument("modulus too small");
  if (s <= 0 || s >= n) throw InvalidArgument("s must lie in (0, N)");
  if (gcd(s, n) != 1) throw InvalidArgument("s must be coprime to N");
  return {n, s, mod(s * s, n)};
}

QrpIdentity gen_qrp_identity(std::size_t bits, RandomStream& rng) {
  const BigInt n = numtheory::gen_blum(bits, rng).n();
  BigInt s;
  do {
    s = numtheory::random_unit(n, rng);
  } while (mod(s * s, n) == 1);
  return make_qrp_identity(n, s);
}

Bytes encode_verdict(const ZkVerdict& v) {
  return {static_cast<std::uint8_t>(v.accepted ? 1 : 0), static_cast<std::uint8_t>(v.rounds),
          static_cast<std::uint8_t>(v.failure_round ? *v.failure_round : 0xff)};
}

std::optional<ZkVerdict> decode_verdict(const Bytes& b) {
  if (b.size() != 3 || b[0] > 1) return std::nullopt;
  ZkVerdict v{b[0] == 1, b[1], std::nullopt};
  if (b[2] != 0xff) v.failure_round = b[2];
  return v;
}

// Schemes -----------------------------------------------------------------------

const session::ProtocolInfo& zkp_qrp_protocol() {
  static const auto& info = make_info("zkp-qrp", "Zero-knowledge proof of a square root mod N",
                                      "a = x^2, c in {0,1}, y = x s^c; B checks y != 0 and y^2 = a v^c", kQrpBase);
  return info;
}

const session::ProtocolInfo& zkp_qrp_cheat_protocol() {
  static const auto& info = make_info("zkp-qrp-cheat", "Square-root proof with a prover who lacks s",
                                      "Prover guesses c and commits a = x^2 v^-guess", kQrpBase);
  return info;
}

const session::ProtocolInfo& zkp_graph_protocol() {
  static const auto& info =
      make_info("zkp-graph", "Zero-knowledge proof of a Hamiltonian cycle",
                "G' = pi(G); c = 0 reveals pi, c = 1 reveals the cycle in G'", kGraphBase);
  return info;
}

const session::ProtocolInfo& zkp_graph_cheat_protocol() {
  static const auto& info = make_info("zkp-graph-cheat", "Hamiltonian-cycle proof with a prover who lacks the cycle",
                                      "Prover commits a true copy or a look-alike graph with its own cycle", kGraphBase);
  return info;
}

std::shared_ptr<const RoundChecker> qrp_checker(const BigInt& n, const BigInt& v) {
  return std::make_shared<QrpChecker>(n, v);
}

std::shared_ptr<const RoundChecker> graph_checker(const Graph& g) { return std::make_shared<GraphChecker>(g); }

ZkScheme qrp_scheme(bool cheat) {
  return {cheat ? &zkp_qrp_cheat_protocol() : &zkp_qrp_protocol(), kQrpBase, [](ByteReader& r) {
            const BigInt n = read_int(r);
            const BigInt v = read_int(r);
            require(n >= 15 && mpz_odd_p(n.get_mpz_t()), "N must be an odd composite");
            require(v > 0 && v < n && gcd(v, n) == 1, "v must be a unit mod N");
            return qrp_checker(n, v);
          }};
}

ZkScheme graph_scheme(bool cheat) {
  return {cheat ? &zkp_graph_cheat_protocol() : &zkp_graph_protocol(), kGraphBase, [](ByteReader& r) {
            const Graph g = graphs::read_graph(r);
            require(g.size() >= 3, "graph needs at least three vertices");
            return graph_checker(g);
          }};
}

Bytes qrp_statement(const BigInt& n, const BigInt& v) {
  ByteWriter w;
  write_int(w, n);
  write_int(w, v);
  return std::move(w).take();
}

Bytes graph_statement(const Graph& g) { return graph_bytes(g); }

std::unique_ptr<RoundProver> qrp_prover(const QrpIdentity& id) { return std::make_unique<QrpProver>(id); }
std::unique_ptr<RoundProver> qrp_cheat_prover(const BigInt& n, const BigInt& v) {
  return std::make_unique<QrpCheatProver>(n, v);
}
std::unique_ptr<RoundSimulator> qrp_simulator(const BigInt& n, const BigInt& v) {
  return std::make_unique<QrpSimulator>(n, v);
}
std::unique_ptr<RoundProver> graph_prover(const PlantedSolution& planted) {
  if (!graphs::is_hamiltonian_cycle(planted.graph, planted.witness)) throw InvalidArgument("witness is not a Hamiltonian cycle");
  return std::make_unique<GraphProver>(planted);
}
std::unique_ptr<RoundProver> graph_cheat_prover(const Graph& g) { return std::make_unique<GraphCheatProver>(g); }
std::unique_ptr<RoundSimulator> graph_simulator(const Graph& g) { return std::make_unique<GraphSimulator>(g); }

// Parties -------------------------------------------------------------------

ZkProver::ZkProver(ZkScheme scheme, std::unique_ptr<RoundProver> prover, std::size_t m, RandomStream rng)
    : Party(std::move(rng)), scheme_(std::move(scheme)), prover_(std::move(prover)), m_(m) {
  if (m_ < 1 || m_ > kMaxRounds) throw InvalidArgument("rounds must be in [1, 255]");
}

Message ZkProver::commitment() {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(round_));
  w.raw(prover_->commit(rng_));
  return make_message(scheme_.tag_base + kCommit, std::move(w));
}

std::vector<Message> ZkProver::start() {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(m_));
  w.raw(prover_->statement());
  std::vector<Message> out{make_message(scheme_.tag_base + kSetup, std::move(w))};
  out.push_back(commitment());
  return out;
}

std::vector<Message> ZkProver::receive(const Message& m) {
  if (m.tag == scheme_.tag_base + kChallenge) {
    require(answerable_.size() == round_, "unexpected message");
    const bool c = challenge_of(m) == 1;
    answerable_.push_back(prover_->can_answer(c));
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(round_));
    w.raw(prover_->respond(c));
    return {make_message(scheme_.tag_base + kResponse, std::move(w))};
  }
  require(m.tag == scheme_.tag_base + kResult && answerable_.size() == round_ + 1, "unexpected message");
  Payload in(m, "round-result");
  const auto [round, passed] = read_result(*in);
  in.done();
  require(round == round_, "round result out of order");
  if (!passed) {
    told_ = ZkVerdict{false, m_, round_};
    finished_ = true;
    return {};
  }
  if (++round_ == m_) {
    told_ = ZkVerdict{true, m_, std::nullopt};
    finished_ = true;
    return {};
  }
  return {commitment()};
}

std::string ZkProver::summary() const {
  if (!told_) return "incomplete after " + std::to_string(round_) + " rounds";
  return told_->accepted ? "proof accepted after " + std::to_string(m_) + " rounds"
                         : "proof rejected at round " + std::to_string(*told_->failure_round);
}

ZkVerifier::ZkVerifier(ZkScheme scheme, RandomStream rng) : Party(std::move(rng)), scheme_(std::move(scheme)) {}

std::vector<Message> ZkVerifier::receive(const Message& m) {
  const std::uint8_t base = scheme_.tag_base;
  if (m.tag == base + kSetup) {
    require(!checker_, "statement sent twice");
    Payload in(m, "statement");
    m_ = in->u8();
    require(m_ >= 1, "at least one round is required");
    checker_ = scheme_.checker(*in);
    in.done();
    return {};
  }
  if (m.tag == base + kCommit) {
    require(checker_ && !commitment_ && !verdict_, "unexpected message");
    Payload in(m, "commitment");
    require(in->u8() == round_, "commitment round out of order");
    commitment_ = rest(*in);
    const bool c = rng_.bit();
    challenges_.push_back(c);
    return {Message{static_cast<std::uint8_t>(base + kChallenge), Bytes{static_cast<std::uint8_t>(c ? 1 : 0)}}};
  }
  require(m.tag == base + kResponse && commitment_, "unexpected message");
  Payload in(m, "response");
  require(in->u8() == round_, "response round out of order");
  const Bytes response = rest(*in);
  const bool passed = !checker_->check(*commitment_, challenges_.back(), response).has_value();
  commitment_.reset();
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(round_));
  w.u8(passed ? 1 : 0);
  if (!passed) {
    verdict_ = ZkVerdict{false, m_, round_};
    finished_ = true;
  } else if (round_ + 1 == m_) {
    verdict_ = ZkVerdict{true, m_, std::nullopt};
    finished_ = true;
  }
  ++round_;
  return {make_message(base + kResult, std::move(w))};
}

Bytes ZkVerifier::private_output() const { return verdict_ ? encode_verdict(*verdict_) : Bytes{}; }

std::string ZkVerifier::summary() const {
  if (!verdict_) return "incomplete after " + std::to_string(round_) + " rounds";
  return verdict_->accepted ? "accepted after " + std::to_string(m_) + " rounds"
                            : "rejected at round " + std::to_string(*verdict_->failure_round);
}

SessionResult run_zkp(const ZkScheme& scheme, const std::function<std::unique_ptr<RoundProver>(RandomStream&)>& make,
                      std::size_t m, std::uint64_t seed_a, std::uint64_t seed_b, Transport transport) {
  return session::run_session(
      *scheme.info,
      [&](RandomStream r) {
        auto prover = make(r);
        return std::make_unique<ZkProver>(scheme, std::move(prover), m, std::move(r));
      },
      [&](RandomStream r) { return std::make_unique<ZkVerifier>(scheme, std::move(r)); }, seed_a, seed_b, transport);
}

session::FunctionalDefinition zkp_definition() {
  return [](const session::PartyMachine& pa, const session::PartyMachine& pb) {
    const auto& a = dynamic_cast<const ZkProver&>(pa);
    const auto& b = dynamic_cast<const ZkVerifier&>(pb);
    const std::size_t m = b.verdict() ? b.verdict()->rounds : 0;
    ZkVerdict expected{true, m, std::nullopt};
    for (std::size_t i = 0; i < a.answerable().size(); ++i)
      if (!a.answerable()[i]) {
        expected = {false, m, i};
        break;
      }
    return std::pair<Bytes, Bytes>{Bytes{}, encode_verdict(expected)};
  };
}

std::optional<ZkVerdict> zk_verdict(const SessionResult& r) { return decode_verdict(r.b.private_output); }

void verify_zkp(const session::Transcript& t, const ZkScheme& scheme) {
  protocol::verify_with_cursor(t, *scheme.info, [&](protocol::TranscriptCursor& c) {
    const std::uint8_t base = scheme.tag_base;
    ByteReader r = c.next(base + kSetup);
    const std::size_t m = r.u8();
    require(m >= 1, "at least one round is required");
    const auto checker = scheme.checker(r);
    r.expect_done("statement");
    for (std::size_t round = 0; round < m; ++round) {
      r = c.next(base + kCommit);
      require(r.u8() == round, "commitment round out of order");
      const Bytes commitment = rest(r);
      (void)c.next(base + kChallenge);
      const bool challenge = challenge_of(c.current()) == 1;
      r = c.next(base + kResponse);
      require(r.u8() == round, "response round out of order");
      const Bytes response = rest(r);
      const auto failure = checker->check(commitment, challenge, response);
      r = c.next(base + kResult);
      const auto [res_round, passed] = read_result(r);
      r.expect_done("round-result");
      require(res_round == round, "round result out of order");
      if (passed && failure) throw VerificationError("round recorded as passed but " + *failure);
      require(passed || failure.has_value(), "round recorded as failed but it verifies");
      if (!passed) break;
    }
  });
}

// QRP -------------------------------------------------------------------------

SessionResult qrp_zkp(const QrpZkConfig& config, std::uint64_t seed_a, std::uint64_t seed_b, Transport transport) {
  return run_zkp(
      qrp_scheme(config.cheat),
      [&](RandomStream& rng) {
        const QrpIdentity id = config.identity ? *config.identity : gen_qrp_identity(config.bits, rng);
        return config.cheat ? qrp_cheat_prover(id.n, id.v) : qrp_prover(id);
      },
      config.m, seed_a, seed_b, transport);
}

BigInt extract_qrp_secret(const RoundProver& prover, const BigInt& n, RandomStream& rng) {
  auto p = prover.clone();
  (void)p->commit(rng);
  auto rewound = p->clone();
  const BigInt y0 = parse_int(rewound->respond(false));
  const BigInt y1 = parse_int(p->respond(true));
  return mod(y1 * numtheory::inverse_mod(y0, n), n);
}

// Graph -----------------------------------------------------------------------

SessionResult graph_zkp(const GraphZkConfig& config, std::uint64_t seed_a, std::uint64_t seed_b, Transport transport) {
  return run_zkp(
      graph_scheme(config.cheat),
      [&](RandomStream& rng) {
        const PlantedSolution planted =
            config.planted ? *config.planted : graphs::gen_hamiltonian_graph(config.n, config.noise_edges, rng);
        return config.cheat ? graph_cheat_prover(planted.graph) : graph_prover(planted);
      },
      config.m, seed_a, seed_b, transport);
}

std::vector<graphs::Vertex> extract_graph_witness(const RoundProver& prover, RandomStream& rng) {
  auto p = prover.clone();
  (void)p->commit(rng);
  auto rewound = p->clone();
  const Bytes b0 = rewound->respond(false);
  ByteReader rp(b0);
  const graphs::Permutation pi = graphs::read_perm(rp);
  const Bytes b1 = p->respond(true);
  ByteReader rc(b1);
  const auto cycle = graphs::read_vertices(rc);
  return graphs::map_vertices(graphs::invert(pi), cycle);
}

// Simulation ------------------------------------------------------------------

Simulation simulate(const ZkScheme& scheme, const Bytes& statement, const RoundSimulator& sim, std::size_t m,
                    std::uint64_t verifier_seed, std::uint64_t simulator_seed, std::size_t budget) {
  if (m < 1 || m > kMaxRounds) throw InvalidArgument("rounds must be in [1, 255]");
  const std::uint8_t base = scheme.tag_base;
  Simulation out;
  auto record = [&](const Message& msg) {
    const session::TagInfo* info = scheme.info->tags.find(msg.tag);
    out.transcript.append({info->direction, info->step_label, msg});
  };
  ZkVerifier verifier(scheme, RandomStream(verifier_seed));
  RandomStream rng(simulator_seed);

  ByteWriter setup;
  setup.u8(static_cast<std::uint8_t>(m));
  setup.raw(statement);
  const Message setup_msg = make_message(base + kSetup, std::move(setup));
  (void)verifier.receive(setup_msg);
  record(setup_msg);

  for (std::size_t round = 0; round < m; ++round) {
    std::size_t tries = 0;
    for (;;) {
      if (++tries > budget) throw Error("simulator exhausted its retry budget in round " + std::to_string(round));
      const bool guess = rng.bit();
      auto [commitment, response] = sim.fake(guess, rng);
      ByteWriter cw;
      cw.u8(static_cast<std::uint8_t>(round));
      cw.raw(commitment);
      const Message commit_msg = make_message(base + kCommit, std::move(cw));
      ZkVerifier trial = verifier;
      const Message challenge = trial.receive(commit_msg).at(0);
      if ((challenge_of(challenge) == 1) != guess) continue;
      ByteWriter rw;
      rw.u8(static_cast<std::uint8_t>(round));
      rw.raw(response);
      const Message response_msg = make_message(base + kResponse, std::move(rw));
      const Message result = trial.receive(response_msg).at(0);
      verifier = std::move(trial);
      record(commit_msg);
      record(challenge);
      record(response_msg);
      record(result);
      break;
    }
    out.tries.push_back(tries);
  }
  out.verdict = *verifier.verdict();
  return out;
}

Simulation qrp_zkp_simulate(const BigInt& n, const BigInt& v, std::size_t m, std::uint64_t verifier_seed,
                            std::uint64_t simulator_seed, std::size_t budget) {
  return simulate(qrp_scheme(), qrp_statement(n, v), *qrp_simulator(n, v), m, verifier_seed, simulator_seed, budget);
}

Simulation graph_zkp_simulate(const Graph& g, std::size_t m, std::uint64_t verifier_seed, std::uint64_t simulator_seed,
                              std::size_t budget) {
  return simulate(graph_scheme(), graph_statement(g), *graph_simulator(g), m, verifier_seed, simulator_seed, budget);
}

}  // namespace tpc::zkproof
