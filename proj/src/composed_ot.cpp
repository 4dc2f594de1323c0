#include "tpc/oblivious.hpp"

namespace tpc::oblivious {

using graphs::apply_perm;
using protocol::make_message;
using protocol::Payload;
using protocol::require;
using session::Direction;
using session::Message;

namespace {

constexpr std::uint8_t kField = 0x41;
constexpr std::uint8_t kGraphsKeys = 0x42;
constexpr std::uint8_t kTransfers = 0x43;

std::size_t share_bits(std::size_t n, const BigInt& p) {
  const std::size_t k = protocol::rank_bits(n);
  require(k >= 1 && k < bit_length(p), "field too small to carry a permutation rank");
  return k;
}

BitString encode_share(const Permutation& pi, std::size_t k) {
  return BitString::low_bits(protocol::permutation_rank(pi.mapping()), k);
}

std::optional<Permutation> decode_share(const BitString& bits, std::size_t n) {
  try {
    return Permutation(protocol::permutation_unrank(bits.to_integer(), n));
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
}

}  // namespace

const session::ProtocolInfo& ot_from_two_1of2_protocol() {
  static const session::ProtocolInfo info{
      "ot-from-two-1of2",
      "Graph OT built from two 1-out-of-2 transfers",
      "Receiver recovers G1 -> G2 only when both isomorphism shares are delivered",
      {{kField, Direction::AtoB, "Set-up", "field"},
       {kGraphsKeys, Direction::BtoA, "Challenge", "graphs-and-keys"},
       {kTransfers, Direction::AtoB, "Response", "transfers"}},
      "nothing",
      "isomorphism G1 -> G2, or nothing",
  };
  return info;
}

ComposedOtSender::ComposedOtSender(ComposedOtConfig config, RandomStream rng)
    : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> ComposedOtSender::start() {
  field_ = config_.field ? *config_.field : numtheory::gen_field(config_.bits, rng_);
  ByteWriter w;
  protocol::write_field(w, *field_);
  return {make_message(kField, std::move(w))};
}

std::vector<Message> ComposedOtSender::receive(const Message& m) {
  require(m.tag == kGraphsKeys, "unexpected message");
  Payload in(m, "graphs-and-keys");
  Graph g1 = graphs::read_graph(*in);
  Graph g2 = graphs::read_graph(*in);
  std::array<std::pair<BigInt, BigInt>, 2> keys{read_dlp_keys(*in), read_dlp_keys(*in)};
  in.done();
  require(g1.size() == g2.size() && g1.size() <= graphs::kOracleBound, "graphs differ in size or exceed the oracle bound");
  const std::size_t n = g1.size();
  const std::size_t k = share_bits(n, field_->p());
  const BigInt c = dlp_ot_element(field_->p());
  for (const auto& [b0, b1] : keys) check_dlp_keys(*field_, c, b0, b1);

  const auto rho = graphs::find_isomorphism(g1, g2);
  require(rho.has_value(), "the receiver's graphs are not isomorphic");
  // H = tau(G1); f1 = tau: G1 -> H, f2 = rho o tau^-1: H -> G2.
  const Permutation tau = graphs::random_perm(n, rng_);
  f1_ = tau;
  f2_ = graphs::compose(*rho, graphs::invert(tau));

  // Decoys never coincide with a real share and never compose to the real map.
  const Permutation whole = graphs::compose(*f2_, *f1_);
  Permutation d1 = graphs::random_perm(n, rng_), d2 = graphs::random_perm(n, rng_);
  while (d1 == *f1_ || d2 == *f2_ || graphs::compose(d2, d1) == whole) {
    d1 = graphs::random_perm(n, rng_);
    d2 = graphs::random_perm(n, rng_);
  }

  ByteWriter w;
  const std::array<const Permutation*, 2> real{&*f1_, &*f2_};
  const std::array<const Permutation*, 2> decoy{&d1, &d2};
  for (int t = 0; t < 2; ++t) {
    positions_[t] = config_.sender_positions ? (*config_.sender_positions)[t] : rng_.bit();
    const BitString r = encode_share(*real[t], k), d = encode_share(*decoy[t], k);
    const BitString& s0 = positions_[t] ? d : r;
    const BitString& s1 = positions_[t] ? r : d;
    write_dlp_reply(w, dlp_ot_respond(*field_, keys[t].first, keys[t].second, s0, s1, rng_));
  }
  finished_ = true;
  return {make_message(kTransfers, std::move(w))};
}

std::string ComposedOtSender::summary() const {
  if (!finished_) return "incomplete";
  return std::string("real shares at positions ") + (positions_[0] ? "1" : "0") + "," + (positions_[1] ? "1" : "0");
}

ComposedOtReceiver::ComposedOtReceiver(ComposedOtConfig config, RandomStream rng)
    : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> ComposedOtReceiver::receive(const Message& m) {
  if (m.tag == kField) {
    require(!field_, "field sent twice");
    Payload in(m, "field");
    field_ = protocol::read_field(*in);
    in.done();
    graphs_ = config_.receiver_graphs ? *config_.receiver_graphs : gen_isomorphism_secret(config_.n, rng_);
    (void)share_bits(graphs_->g1.size(), field_->p());
    const BigInt c = dlp_ot_element(field_->p());
    ByteWriter w;
    graphs::write_graph(w, graphs_->g1);
    graphs::write_graph(w, graphs_->g2);
    for (int t = 0; t < 2; ++t) {
      choices_[t] = config_.receiver_choices ? (*config_.receiver_choices)[t] : rng_.bit();
      choosers_.emplace_back(*field_, c, choices_[t], rng_);
      write_dlp_keys(w, choosers_.back().beta(0), choosers_.back().beta(1));
    }
    return {make_message(kGraphsKeys, std::move(w))};
  }
  require(m.tag == kTransfers && field_, "unexpected message");
  const std::size_t n = graphs_->g1.size();
  const std::size_t k = share_bits(n, field_->p());
  Payload in(m, "transfers");
  std::array<DlpOtReply, 2> replies{read_dlp_reply(*in, k), read_dlp_reply(*in, k)};
  in.done();
  for (int t = 0; t < 2; ++t) {
    const int i = choices_[t] ? 1 : 0;
    shares_[t] = decode_share(choosers_[t].recover(replies[t].alpha[i], replies[t].masked[i]), n);
  }
  if (shares_[0] && shares_[1]) {
    Permutation candidate = graphs::compose(*shares_[1], *shares_[0]);
    if (apply_perm(graphs_->g1, candidate) == graphs_->g2) composed_ = std::move(candidate);
  }
  finished_ = true;
  return {};
}

Bytes ComposedOtReceiver::private_output() const {
  ByteWriter w;
  w.u8(composed_ ? 1 : 0);
  if (composed_) graphs::write_perm(w, *composed_);
  return std::move(w).take();
}

std::string ComposedOtReceiver::summary() const {
  if (!finished_) return "incomplete";
  return composed_ ? std::string("composition verifies: obtained G1 -> G2") : std::string("composition fails: nothing");
}

SessionResult ot_from_two_1of2(const ComposedOtConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                               Transport transport) {
  return session::run_session(
      ot_from_two_1of2_protocol(),
      [&](RandomStream r) { return std::make_unique<ComposedOtSender>(config, std::move(r)); },
      [&](RandomStream r) { return std::make_unique<ComposedOtReceiver>(config, std::move(r)); }, seed_a, seed_b,
      transport);
}

session::FunctionalDefinition ot_from_two_1of2_definition() {
  return [](const session::PartyMachine& pa, const session::PartyMachine& pb) {
    const auto& a = dynamic_cast<const ComposedOtSender&>(pa);
    const auto& b = dynamic_cast<const ComposedOtReceiver&>(pb);
    const bool both = a.positions()[0] == b.choices()[0] && a.positions()[1] == b.choices()[1];
    ByteWriter w;
    w.u8(both ? 1 : 0);
    if (both) graphs::write_perm(w, graphs::compose(*a.f2(), *a.f1()));
    return std::pair<Bytes, Bytes>{Bytes{}, std::move(w).take()};
  };
}

void verify_ot_from_two_1of2(const session::Transcript& t) {
  protocol::verify_with_cursor(t, ot_from_two_1of2_protocol(), [](protocol::TranscriptCursor& c) {
    ByteReader r = c.next(kField);
    FieldContext field = protocol::read_field(r);
    r.expect_done("field");
    r = c.next(kGraphsKeys);
    Graph g1 = graphs::read_graph(r);
    Graph g2 = graphs::read_graph(r);
    std::array<std::pair<BigInt, BigInt>, 2> keys{read_dlp_keys(r), read_dlp_keys(r)};
    r.expect_done("graphs-and-keys");
    require(g1.size() == g2.size() && g1.size() <= graphs::kOracleBound, "graphs differ in size or exceed the oracle bound");
    require(g1.degree_sequence() == g2.degree_sequence(), "graphs are not isomorphic");
    const std::size_t k = share_bits(g1.size(), field.p());
    const BigInt elem = dlp_ot_element(field.p());
    for (const auto& [b0, b1] : keys) check_dlp_keys(field, elem, b0, b1);
    r = c.next(kTransfers);
    (void)read_dlp_reply(r, k);
    (void)read_dlp_reply(r, k);
    r.expect_done("transfers");
  });
}

}  // namespace tpc::oblivious
