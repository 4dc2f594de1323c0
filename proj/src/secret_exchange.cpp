#include "tpc/derived.hpp"

namespace tpc::derived {

using graphs::apply_perm;
using protocol::make_message;
using protocol::Payload;
using protocol::require;
using session::Direction;
using session::Message;
using session::Role;

namespace {

constexpr std::uint8_t kAGraphs = 0x71;
constexpr std::uint8_t kBGraphs = 0x72;
constexpr std::uint8_t kACopy = 0x73;
constexpr std::uint8_t kBCopy = 0x74;
constexpr std::uint8_t kAIso = 0x75;
constexpr std::uint8_t kBIso = 0x76;

void check_pair(const Graph& g1, const Graph& g2) {
  require(g1.size() == g2.size() && g1.size() <= graphs::kOracleBound, "graph pair differs in size or exceeds the oracle bound");
  require(g1.degree_sequence() == g2.degree_sequence(), "graph pair has different degree sequences");
}

std::size_t read_round(ByteReader& r, std::size_t expected) {
  const std::size_t round = r.u16();
  require(round == expected, "round index out of order");
  return round;
}

}  // namespace

const session::ProtocolInfo& secret_exchange_protocol() {
  static const session::ProtocolInfo info{
      "secret-exchange-graph",
      "Graph-based secret exchange",
      "Both parties run graph OT of their isomorphism secrets in each of m rounds",
      {{kAGraphs, Direction::AtoB, "Set-up", "a-graphs"},
       {kBGraphs, Direction::BtoA, "Set-up", "b-graphs"},
       {kACopy, Direction::AtoB, "Challenge", "a-copy"},
       {kBCopy, Direction::BtoA, "Challenge", "b-copy"},
       {kAIso, Direction::AtoB, "Response", "a-isomorphism"},
       {kBIso, Direction::BtoA, "Response", "b-isomorphism"}},
      "B's isomorphism secret, or nothing",
      "A's isomorphism secret, or nothing",
  };
  return info;
}

ExchangeParty::ExchangeParty(Role role, SecretExchangeConfig config, RandomStream rng)
    : Party(std::move(rng)), role_(role), config_(std::move(config)) {}

std::vector<Message> ExchangeParty::start() {
  if (role_ != Role::A) return {};
  own_ = config_.a_secret ? *config_.a_secret : oblivious::gen_isomorphism_secret(config_.n, rng_);
  rounds_ = config_.rounds;
  if (rounds_ > 0xffff) throw InvalidArgument("too many rounds");
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(rounds_));
  graphs::write_graph(w, own_->g1);
  graphs::write_graph(w, own_->g2);
  return {make_message(kAGraphs, std::move(w))};
}

std::vector<Message> ExchangeParty::send_copy() {
  my_index_ = static_cast<int>(rng_.bit());
  sigma_ = graphs::random_perm(other_g1_->size(), rng_);
  copy_indices_.push_back(my_index_);
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(round_));
  graphs::write_graph(w, apply_perm(my_index_ == 0 ? *other_g1_ : *other_g2_, *sigma_));
  return {make_message(role_ == Role::A ? kACopy : kBCopy, std::move(w))};
}

Message ExchangeParty::answer(const Graph& h) {
  require(h.size() == own_->g1.size(), "copy has the wrong number of vertices");
  const int j = static_cast<int>(rng_.bit());
  answer_indices_.push_back(j);
  const Graph& target = j == 0 ? own_->g1 : own_->g2;
  std::optional<Permutation> phi;
  if (role_ == Role::A && config_.cheat_a_wrong_isomorphism) {
    do {
      phi = graphs::random_perm(h.size(), rng_);
    } while (apply_perm(h, *phi) == target);
  } else {
    phi = graphs::find_isomorphism(h, target);
    require(phi.has_value(), "copy is not isomorphic to this party's graphs");
  }
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(round_));
  w.u8(static_cast<std::uint8_t>(j));
  graphs::write_perm(w, *phi);
  return make_message(role_ == Role::A ? kAIso : kBIso, std::move(w));
}

void ExchangeParty::absorb_answer(ByteReader& r) {
  read_round(r, round_);
  const int j = r.u8();
  Permutation phi = graphs::read_perm(r);
  r.expect_done("isomorphism");
  require(j == 0 || j == 1, "graph index must be 0 or 1");
  require(phi.size() == other_g1_->size(), "isomorphism has the wrong size");
  const Graph& gi = my_index_ == 0 ? *other_g1_ : *other_g2_;
  require(apply_perm(apply_perm(gi, *sigma_), phi) == (j == 0 ? *other_g1_ : *other_g2_),
          "isomorphism does not map the copy onto the named graph");
  const bool got = j != my_index_;
  success_.push_back(got);
  if (got && !obtained_) {
    Permutation through = graphs::compose(phi, *sigma_);
    obtained_ = my_index_ == 0 ? std::move(through) : graphs::invert(through);
  }
}

std::vector<Message> ExchangeParty::receive(const Message& m) {
  if (role_ == Role::A) {
    if (m.tag == kBGraphs) {
      require(!other_g1_, "graphs sent twice");
      Payload in(m, "b-graphs");
      other_g1_ = graphs::read_graph(*in);
      other_g2_ = graphs::read_graph(*in);
      in.done();
      check_pair(*other_g1_, *other_g2_);
      if (rounds_ == 0) {
        finished_ = true;
        return {};
      }
      return send_copy();
    }
    if (m.tag == kBCopy) {
      require(other_g1_.has_value(), "unexpected message");
      Payload in(m, "b-copy");
      read_round(*in, round_);
      Graph h = graphs::read_graph(*in);
      in.done();
      return {answer(h)};
    }
    require(m.tag == kBIso && other_g1_, "unexpected message");
    Payload in(m, "b-isomorphism");
    absorb_answer(*in);
    if (++round_ == rounds_) {
      finished_ = true;
      return {};
    }
    return send_copy();
  }

  if (m.tag == kAGraphs) {
    require(!other_g1_, "graphs sent twice");
    Payload in(m, "a-graphs");
    rounds_ = in->u16();
    other_g1_ = graphs::read_graph(*in);
    other_g2_ = graphs::read_graph(*in);
    in.done();
    check_pair(*other_g1_, *other_g2_);
    own_ = config_.b_secret ? *config_.b_secret : oblivious::gen_isomorphism_secret(config_.n, rng_);
    if (rounds_ == 0) finished_ = true;
    ByteWriter w;
    graphs::write_graph(w, own_->g1);
    graphs::write_graph(w, own_->g2);
    return {make_message(kBGraphs, std::move(w))};
  }
  if (m.tag == kACopy) {
    require(other_g1_.has_value(), "unexpected message");
    Payload in(m, "a-copy");
    read_round(*in, round_);
    pending_copy_ = graphs::read_graph(*in);
    in.done();
    return send_copy();
  }
  require(m.tag == kAIso && pending_copy_, "unexpected message");
  Payload in(m, "a-isomorphism");
  absorb_answer(*in);
  Message reply = answer(*pending_copy_);
  pending_copy_.reset();
  if (++round_ == rounds_) finished_ = true;
  return {std::move(reply)};
}

Bytes ExchangeParty::private_output() const {
  ByteWriter w;
  w.u8(obtained_ ? 1 : 0);
  if (obtained_) graphs::write_perm(w, *obtained_);
  return std::move(w).take();
}

std::string ExchangeParty::summary() const {
  std::size_t wins = 0;
  for (bool s : success_) wins += s ? 1 : 0;
  return std::string(obtained_ ? "obtained" : "did not obtain") + " the counterpart's secret (" +
         std::to_string(wins) + " of " + std::to_string(success_.size()) + " rounds succeeded)";
}

SessionResult secret_exchange_graph(const SecretExchangeConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                                    Transport transport) {
  return session::run_session(
      secret_exchange_protocol(),
      [&](RandomStream r) { return std::make_unique<ExchangeParty>(Role::A, config, std::move(r)); },
      [&](RandomStream r) { return std::make_unique<ExchangeParty>(Role::B, config, std::move(r)); }, seed_a, seed_b,
      transport);
}

session::FunctionalDefinition secret_exchange_definition() {
  return [](const session::PartyMachine& pa, const session::PartyMachine& pb) {
    const auto& a = dynamic_cast<const ExchangeParty&>(pa);
    const auto& b = dynamic_cast<const ExchangeParty&>(pb);
    auto expected = [](const ExchangeParty& learner, const ExchangeParty& owner) {
      bool got = false;
      for (std::size_t r = 0; r < learner.copy_indices().size() && r < owner.answer_indices().size(); ++r)
        got = got || learner.copy_indices()[r] != owner.answer_indices()[r];
      ByteWriter w;
      w.u8(got ? 1 : 0);
      if (got) graphs::write_perm(w, owner.own_secret().pi);
      return std::move(w).take();
    };
    return std::pair<Bytes, Bytes>{expected(a, b), expected(b, a)};
  };
}

void verify_secret_exchange(const session::Transcript& t) {
  protocol::verify_with_cursor(t, secret_exchange_protocol(), [](protocol::TranscriptCursor& c) {
    ByteReader r = c.next(kAGraphs);
    const std::size_t rounds = r.u16();
    Graph a1 = graphs::read_graph(r), a2 = graphs::read_graph(r);
    r.expect_done("a-graphs");
    check_pair(a1, a2);
    r = c.next(kBGraphs);
    Graph b1 = graphs::read_graph(r), b2 = graphs::read_graph(r);
    r.expect_done("b-graphs");
    check_pair(b1, b2);
    auto check_answer = [&](ByteReader& rr, const Graph& h, const Graph& g1, const Graph& g2, std::size_t round) {
      read_round(rr, round);
      const int j = rr.u8();
      Permutation phi = graphs::read_perm(rr);
      rr.expect_done("isomorphism");
      require(j == 0 || j == 1, "graph index must be 0 or 1");
      require(phi.size() == h.size() && apply_perm(h, phi) == (j == 0 ? g1 : g2),
              "isomorphism does not map the copy onto the named graph");
    };
    for (std::size_t round = 0; round < rounds; ++round) {
      r = c.next(kACopy);
      read_round(r, round);
      Graph ha = graphs::read_graph(r);
      r.expect_done("a-copy");
      require(ha.size() == b1.size(), "copy has the wrong number of vertices");
      r = c.next(kBCopy);
      read_round(r, round);
      Graph hb = graphs::read_graph(r);
      r.expect_done("b-copy");
      require(hb.size() == a1.size(), "copy has the wrong number of vertices");
      r = c.next(kAIso);
      check_answer(r, hb, a1, a2, round);
      r = c.next(kBIso);
      check_answer(r, ha, b1, b2, round);
    }
  });
}

}  // namespace tpc::derived
