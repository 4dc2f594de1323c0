#include "tpc/oblivious.hpp"

namespace tpc::oblivious {

using graphs::apply_perm;
using graphs::Vertex;
using protocol::make_message;
using protocol::Payload;
using protocol::require;
using session::Direction;
using session::Message;

namespace {

constexpr std::uint8_t kGraphs = 0x31;
constexpr std::uint8_t kCopies = 0x32;
constexpr std::uint8_t kSolution = 0x33;

const session::TagCatalog& sale_tags() {
  static const session::TagCatalog tags{{kGraphs, Direction::AtoB, "Set-up", "graphs"},
                                        {kCopies, Direction::BtoA, "Challenge", "copies"},
                                        {kSolution, Direction::AtoB, "Response", "solution"}};
  return tags;
}

std::vector<Graph> read_graph_list(ByteReader& r) {
  const std::size_t count = r.u16();
  std::vector<Graph> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(graphs::read_graph(r));
  return out;
}

void write_graph_list(ByteWriter& w, const std::vector<Graph>& list) {
  w.u16(static_cast<std::uint16_t>(list.size()));
  for (const auto& g : list) graphs::write_graph(w, g);
}

// Equal vertex count, edge count and degree sequence: the properties the
// receiver can test without solving anything.
void check_public_graphs(const std::vector<Graph>& list) {
  require(list.size() >= 2, "at least two public graphs are required");
  require(list[0].size() >= 3 && list[0].size() <= graphs::kOracleBound, "graph size outside [3, oracle bound]");
  const auto degrees = list[0].degree_sequence();
  for (const auto& g : list)
    require(g.size() == list[0].size() && g.degree_sequence() == degrees, "public graphs are not indistinguishable");
}

void check_copies(const std::vector<Graph>& copies, const std::vector<Graph>& originals) {
  require(copies.size() == originals.size(), "copy count differs from the public graph count");
  for (const auto& g : copies) require(g.size() == originals[0].size(), "copy has the wrong number of vertices");
}

}  // namespace

std::vector<graphs::PlantedSolution> gen_sale_items(std::size_t count, std::size_t n, std::size_t noise_edges,
                                                    RandomStream& rng) {
  const graphs::PlantedSolution base = graphs::gen_hamiltonian_graph(n, noise_edges, rng);
  std::vector<graphs::PlantedSolution> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    const Permutation rho = graphs::random_perm(n, rng);
    out.push_back({apply_perm(base.graph, rho), graphs::map_vertices(rho, base.witness)});
  }
  return out;
}

const session::ProtocolInfo& graph_1of2_ot_protocol() {
  static const session::ProtocolInfo info{
      "graph-1of2-ot",
      "Graph-based 1-out-of-2 oblivious transfer",
      "Receiver obtains the Hamiltonian cycle of the public graph it points to",
      sale_tags(),
      "nothing",
      "choice and a Hamiltonian cycle of the chosen graph",
  };
  return info;
}

const session::ProtocolInfo& secret_sale_protocol() {
  static const session::ProtocolInfo info{
      "secret-sale",
      "Secret sale (1-out-of-n graph transfer)",
      "Receiver buys exactly one of n solutions; sender does not learn which",
      sale_tags(),
      "nothing",
      "choice and a Hamiltonian cycle of the chosen graph",
  };
  return info;
}

SaleSender::SaleSender(SecretSaleConfig config, RandomStream rng) : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> SaleSender::start() {
  solutions_ = config_.solutions ? *config_.solutions
                                 : gen_sale_items(config_.items, config_.n, config_.noise_edges, rng_);
  std::vector<Graph> list;
  for (const auto& s : solutions_) list.push_back(s.graph);
  ByteWriter w;
  write_graph_list(w, list);
  return {make_message(kGraphs, std::move(w))};
}

std::vector<Message> SaleSender::receive(const Message& m) {
  require(m.tag == kCopies, "unexpected message");
  Payload in(m, "copies");
  std::vector<Graph> copies = read_graph_list(*in);
  const std::size_t pointer = in->u16();
  in.done();
  std::vector<Graph> originals;
  for (const auto& s : solutions_) originals.push_back(s.graph);
  check_copies(copies, originals);
  require(pointer < copies.size(), "pointer out of range");
  pointed_ = copies[pointer];
  std::vector<Vertex> answer;
  if (config_.cheat_invalid_solution) {
    do {
      answer = graphs::random_perm(pointed_->size(), rng_).mapping();
    } while (graphs::is_hamiltonian_cycle(*pointed_, answer));
  } else {
    // Every public graph is isomorphic to the copy; any one with its witness will do.
    const auto phi = graphs::find_isomorphism(solutions_[0].graph, *pointed_);
    require(phi.has_value(), "pointed copy is not isomorphic to the public graphs");
    answer = graphs::map_vertices(*phi, solutions_[0].witness);
  }
  finished_ = true;
  ByteWriter w;
  graphs::write_vertices(w, answer);
  return {make_message(kSolution, std::move(w))};
}

std::string SaleSender::summary() const { return finished_ ? "solved the pointed copy" : "incomplete"; }

SaleReceiver::SaleReceiver(SecretSaleConfig config, RandomStream rng)
    : Party(std::move(rng)), config_(std::move(config)) {}

std::vector<Message> SaleReceiver::receive(const Message& m) {
  if (m.tag == kGraphs) {
    require(graphs_.empty(), "graphs sent twice");
    Payload in(m, "graphs");
    graphs_ = read_graph_list(*in);
    in.done();
    check_public_graphs(graphs_);
    const std::size_t count = graphs_.size();
    choice_ = config_.choice ? *config_.choice : rng_.below(count);
    require(choice_ < count, "choice out of range");
    // Copy of graph t goes to position order(t).
    const Permutation order = graphs::random_perm(count, rng_);
    std::vector<std::optional<Graph>> slots(count);
    for (std::size_t t = 0; t < count; ++t) {
      Permutation tau = graphs::random_perm(graphs_[t].size(), rng_);
      slots[order(static_cast<Vertex>(t))] = apply_perm(graphs_[t], tau);
      if (t == choice_) tau_ = std::move(tau);
    }
    std::vector<Graph> copies;
    for (auto& s : slots) copies.push_back(std::move(*s));
    ByteWriter w;
    write_graph_list(w, copies);
    w.u16(static_cast<std::uint16_t>(order(static_cast<Vertex>(choice_))));
    return {make_message(kCopies, std::move(w))};
  }
  require(m.tag == kSolution && tau_, "unexpected message");
  Payload in(m, "solution");
  std::vector<Vertex> answer = graphs::read_vertices(*in);
  in.done();
  const Graph copy = apply_perm(graphs_[choice_], *tau_);
  require(graphs::is_hamiltonian_cycle(copy, answer), "returned sequence is not a Hamiltonian cycle of the copy");
  auto mapped = graphs::map_vertices(graphs::invert(*tau_), answer);
  require(graphs::is_hamiltonian_cycle(graphs_[choice_], mapped), "mapped solution does not verify");
  witness_ = std::move(mapped);
  finished_ = true;
  return {};
}

Bytes SaleReceiver::private_output() const {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(choice_));
  if (witness_) graphs::write_vertices(w, *witness_);
  return std::move(w).take();
}

std::string SaleReceiver::summary() const {
  if (!witness_) return finished_ ? std::string("no solution") : std::string("incomplete");
  return "obtained a Hamiltonian cycle of graph " + std::to_string(choice_);
}

namespace {

SessionResult run_sale(const session::ProtocolInfo& info, const SecretSaleConfig& config, std::uint64_t seed_a,
                       std::uint64_t seed_b, Transport transport) {
  return session::run_session(
      info, [&](RandomStream r) { return std::make_unique<SaleSender>(config, std::move(r)); },
      [&](RandomStream r) { return std::make_unique<SaleReceiver>(config, std::move(r)); }, seed_a, seed_b,
      transport);
}

}  // namespace

SessionResult secret_sale(const SecretSaleConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                          Transport transport) {
  return run_sale(secret_sale_protocol(), config, seed_a, seed_b, transport);
}

SessionResult graph_1of2_ot(SecretSaleConfig config, std::uint64_t seed_a, std::uint64_t seed_b, Transport transport) {
  config.items = 2;
  if (config.solutions && config.solutions->size() != 2) throw InvalidArgument("1-out-of-2 transfer needs two graphs");
  return run_sale(graph_1of2_ot_protocol(), config, seed_a, seed_b, transport);
}

session::FunctionalDefinition secret_sale_definition() {
  // y_B is the choice together with a Hamiltonian cycle of the chosen graph.
  // Any cycle is acceptable, so the expected value is rebuilt from B's own
  // result once it is confirmed to be a cycle of the graph A published.
  return [](const session::PartyMachine& pa, const session::PartyMachine& pb) {
    const auto& a = dynamic_cast<const SaleSender&>(pa);
    const auto& b = dynamic_cast<const SaleReceiver&>(pb);
    ByteWriter w;
    w.u16(static_cast<std::uint16_t>(b.choice()));
    if (b.witness() && b.choice() < a.solutions().size() &&
        graphs::is_hamiltonian_cycle(a.solutions()[b.choice()].graph, *b.witness()))
      graphs::write_vertices(w, *b.witness());
    return std::pair<Bytes, Bytes>{Bytes{}, std::move(w).take()};
  };
}

void verify_secret_sale(const session::Transcript& t, const session::ProtocolInfo& protocol) {
  protocol::verify_with_cursor(t, protocol, [](protocol::TranscriptCursor& c) {
    ByteReader r = c.next(kGraphs);
    std::vector<Graph> originals = read_graph_list(r);
    r.expect_done("graphs");
    check_public_graphs(originals);
    r = c.next(kCopies);
    std::vector<Graph> copies = read_graph_list(r);
    const std::size_t pointer = r.u16();
    r.expect_done("copies");
    check_copies(copies, originals);
    require(pointer < copies.size(), "pointer out of range");
    r = c.next(kSolution);
    std::vector<Vertex> answer = graphs::read_vertices(r);
    r.expect_done("solution");
    require(graphs::is_hamiltonian_cycle(copies[pointer], answer),
            "returned sequence is not a Hamiltonian cycle of the pointed copy");
  });
}

}  // namespace tpc::oblivious
