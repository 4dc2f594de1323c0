#include "tpc/oblivious.hpp"

namespace tpc::oblivious {

using graphs::apply_perm;
using protocol::make_message;
using protocol::Payload;
using protocol::require;
using session::Direction;
using session::Message;

namespace {

constexpr std::uint8_t kGraphs = 0x11;
constexpr std::uint8_t kCopy = 0x12;
constexpr std::uint8_t kIsomorphism = 0x13;

void check_pair_shape(const Graph& g1, const Graph& g2) {
  require(g1.size() == g2.size(), "public graphs differ in size");
  require(g1.size() <= graphs::kOracleBound, "public graphs exceed the isomorphism oracle bound");
  require(g1.degree_sequence() == g2.degree_sequence(), "public graphs have different degree sequences");
}

}  // namespace

IsomorphismSecret gen_isomorphism_secret(std::size_t n, RandomStream& rng) {
  Graph g1 = graphs::random_rigid_graph(n, 0.5, rng);
  Permutation pi = graphs::random_perm(n, rng);
  Graph g2 = apply_perm(g1, pi);
  return {std::move(g1), std::move(g2), std::move(pi)};
}

const session::ProtocolInfo& graph_ot_protocol() {
  static const session::ProtocolInfo info{
      "graph-ot",
      "Graph isomorphism oblivious transfer",
      "Sender transfers an isomorphism G1 -> G2; receiver gets it with probability 1/2",
      {{kGraphs, Direction::AtoB, "Set-up", "graphs"},
       {kCopy, Direction::BtoA, "Challenge", "copy"},
       {kIsomorphism, Direction::AtoB, "Response", "isomorphism"}},
      "nothing",
      "isomorphism G1 -> G2, or nothing",
  };
  return info;
}

GraphOtSender::GraphOtSender(GraphOtConfig config, RandomStream rng)
    : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> GraphOtSender::start() {
  secret_ = config_.secret ? *config_.secret : gen_isomorphism_secret(config_.n, rng_);
  ByteWriter w;
  graphs::write_graph(w, secret_->g1);
  graphs::write_graph(w, secret_->g2);
  return {make_message(kGraphs, std::move(w))};
}

std::vector<Message> GraphOtSender::receive(const Message& m) {
  require(m.tag == kCopy, "unexpected message");
  Payload in(m, "copy");
  Graph h = graphs::read_graph(*in);
  in.done();
  require(h.size() == secret_->g1.size(), "copy has the wrong number of vertices");
  j_ = config_.sender_index ? (*config_.sender_index & 1) : static_cast<int>(rng_.bit());
  const Graph& target = j_ == 0 ? secret_->g1 : secret_->g2;
  std::optional<Permutation> phi;
  if (config_.cheat_wrong_isomorphism) {
    do {
      phi = graphs::random_perm(h.size(), rng_);
    } while (apply_perm(h, *phi) == target);
  } else {
    phi = graphs::find_isomorphism(h, target);
    require(phi.has_value(), "copy is not isomorphic to the public graphs");
  }
  finished_ = true;
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(j_));
  graphs::write_perm(w, *phi);
  return {make_message(kIsomorphism, std::move(w))};
}

std::string GraphOtSender::summary() const {
  return j_ < 0 ? std::string("incomplete") : "answered towards G" + std::to_string(j_ + 1);
}

GraphOtReceiver::GraphOtReceiver(GraphOtConfig config, RandomStream rng)
    : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> GraphOtReceiver::receive(const Message& m) {
  if (m.tag == kGraphs) {
    require(!g1_, "graphs sent twice");
    Payload in(m, "graphs");
    g1_ = graphs::read_graph(*in);
    g2_ = graphs::read_graph(*in);
    in.done();
    check_pair_shape(*g1_, *g2_);
    i_ = config_.receiver_index ? (*config_.receiver_index & 1) : static_cast<int>(rng_.bit());
    sigma_ = graphs::random_perm(g1_->size(), rng_);
    ByteWriter w;
    graphs::write_graph(w, apply_perm(i_ == 0 ? *g1_ : *g2_, *sigma_));
    return {make_message(kCopy, std::move(w))};
  }
  require(m.tag == kIsomorphism && g1_, "unexpected message");
  Payload in(m, "isomorphism");
  const int j = in->u8();
  Permutation phi = graphs::read_perm(*in);
  in.done();
  require(j == 0 || j == 1, "graph index must be 0 or 1");
  require(phi.size() == g1_->size(), "isomorphism has the wrong size");
  const Graph h = apply_perm(i_ == 0 ? *g1_ : *g2_, *sigma_);
  require(apply_perm(h, phi) == (j == 0 ? *g1_ : *g2_), "isomorphism does not map the copy onto the named graph");
  // sigma: G_i -> H and phi: H -> G_j, so phi o sigma: G_i -> G_j.
  Permutation through = graphs::compose(phi, *sigma_);
  if (j == i_) {
    same_graph_map_ = std::move(through);
  } else {
    obtained_ = i_ == 0 ? std::move(through) : graphs::invert(through);
    require(apply_perm(*g1_, *obtained_) == *g2_, "composed map does not verify");
  }
  finished_ = true;
  return {};
}

Bytes GraphOtReceiver::private_output() const {
  ByteWriter w;
  w.u8(obtained_ ? 1 : 0);
  if (obtained_) graphs::write_perm(w, *obtained_);
  return std::move(w).take();
}

std::string GraphOtReceiver::summary() const {
  if (!finished_) return "incomplete";
  return obtained_ ? std::string("obtained the isomorphism G1 -> G2") : std::string("learned nothing");
}

SessionResult graph_ot(const GraphOtConfig& config, std::uint64_t seed_a, std::uint64_t seed_b, Transport transport) {
  return session::run_session(
      graph_ot_protocol(), [&](RandomStream r) { return std::make_unique<GraphOtSender>(config, std::move(r)); },
      [&](RandomStream r) { return std::make_unique<GraphOtReceiver>(config, std::move(r)); }, seed_a, seed_b,
      transport);
}

session::FunctionalDefinition graph_ot_definition() {
  return [](const session::PartyMachine& pa, const session::PartyMachine& pb) {
    const auto& a = dynamic_cast<const GraphOtSender&>(pa);
    const auto& b = dynamic_cast<const GraphOtReceiver&>(pb);
    ByteWriter w;
    w.u8(a.answered_index() != b.copy_index() ? 1 : 0);
    if (a.answered_index() != b.copy_index()) graphs::write_perm(w, a.secret().pi);
    return std::pair<Bytes, Bytes>{Bytes{}, std::move(w).take()};
  };
}

void verify_graph_ot(const session::Transcript& t) {
  protocol::verify_with_cursor(t, graph_ot_protocol(), [](protocol::TranscriptCursor& c) {
    ByteReader r = c.next(kGraphs);
    Graph g1 = graphs::read_graph(r);
    Graph g2 = graphs::read_graph(r);
    r.expect_done("graphs");
    check_pair_shape(g1, g2);
    r = c.next(kCopy);
    Graph h = graphs::read_graph(r);
    r.expect_done("copy");
    require(h.size() == g1.size(), "copy has the wrong number of vertices");
    r = c.next(kIsomorphism);
    const int j = r.u8();
    Permutation phi = graphs::read_perm(r);
    r.expect_done("isomorphism");
    require(j == 0 || j == 1, "graph index must be 0 or 1");
    require(phi.size() == h.size() && apply_perm(h, phi) == (j == 0 ? g1 : g2),
            "isomorphism does not map the copy onto the named graph");
  });
}

}  // namespace tpc::oblivious
