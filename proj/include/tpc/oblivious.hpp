#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "tpc/bitstring.hpp"
#include "tpc/graphs.hpp"
#include "tpc/numtheory.hpp"
#include "tpc/protocol.hpp"
#include "tpc/session.hpp"

/// Oblivious transfer: Rabin OT, graph OT, the DLP and graph 1-out-of-2
/// transfers, secret sale and OT composed from two 1-out-of-2 transfers.
namespace tpc::oblivious {

using graphs::Graph;
using graphs::Permutation;
using numtheory::BlumModulus;
using numtheory::FieldContext;
using session::PartyFactory;
using session::SessionResult;
using session::Transport;

// ---------------------------------------------------------------------------
// Rabin OT. The sender's secret is the factorization of N.

struct RabinOtConfig {
  std::size_t bits = 64;
  /// Sender's modulus; generated from the sender's stream when absent.
  std::optional<BlumModulus> modulus;
  /// Receiver's x; sampled from the receiver's stream when absent.
  std::optional<BigInt> receiver_x;
  /// Sender picks this index into the ascending root list instead of a random one.
  std::optional<std::size_t> root_index;
  /// Scripted sender: answers with this value whatever the challenge.
  std::optional<BigInt> forced_root;
};

const session::ProtocolInfo& rabin_ot_protocol();

class RabinOtSender : public protocol::Party {
 public:
  RabinOtSender(RabinOtConfig config, RandomStream rng);
  std::vector<session::Message> start() override;
  std::vector<session::Message> receive(const session::Message& m) override;
  Bytes private_output() const override { return {}; }
  std::string summary() const override;

  const BlumModulus& modulus() const { return *modulus_; }
  const std::optional<BigInt>& sent_root() const { return root_; }

 private:
  RabinOtConfig config_;
  std::optional<BlumModulus> modulus_;
  std::optional<BigInt> root_;
};

class RabinOtReceiver : public protocol::Party {
 public:
  RabinOtReceiver(RabinOtConfig config, RandomStream rng);
  std::vector<session::Message> start() override { return {}; }
  std::vector<session::Message> receive(const session::Message& m) override;
  /// 0x00, or 0x01 followed by the two factors (smaller first).
  Bytes private_output() const override;
  std::string summary() const override;

  const BigInt& x() const { return x_; }
  const std::optional<std::pair<BigInt, BigInt>>& factors() const { return factors_; }

 private:
  RabinOtConfig config_;
  BigInt n_;
  BigInt x_;
  std::optional<std::pair<BigInt, BigInt>> factors_;
};

SessionResult rabin_ot(const RabinOtConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                       Transport transport = Transport::InProcess);
/// y_B = factors when the returned root differs from +-x, nothing otherwise.
session::FunctionalDefinition rabin_ot_definition();
void verify_rabin_ot(const session::Transcript& t);

// ---------------------------------------------------------------------------
// Graph OT. The sender's secret is an isomorphism between two rigid graphs.

struct IsomorphismSecret {
  Graph g1;
  Graph g2;
  Permutation pi;  ///< apply_perm(g1, pi) == g2
};

/// G1 rigid with n vertices, pi uniform, G2 = pi(G1). Requires 6 <= n <= 12.
IsomorphismSecret gen_isomorphism_secret(std::size_t n, RandomStream& rng);

struct GraphOtConfig {
  std::size_t n = 6;
  std::optional<IsomorphismSecret> secret;
  /// Receiver's copy index (0 for G1, 1 for G2).
  std::optional<int> receiver_index;
  /// Sender's answer index.
  std::optional<int> sender_index;
  /// Scripted sender: answers with a random, generally wrong, relabeling.
  bool cheat_wrong_isomorphism = false;
};

const session::ProtocolInfo& graph_ot_protocol();

class GraphOtSender : public protocol::Party {
 public:
  GraphOtSender(GraphOtConfig config, RandomStream rng);
  std::vector<session::Message> start() override;
  std::vector<session::Message> receive(const session::Message& m) override;
  Bytes private_output() const override { return {}; }
  std::string summary() const override;

  const IsomorphismSecret& secret() const { return *secret_; }
  int answered_index() const { return j_; }

 private:
  GraphOtConfig config_;
  std::optional<IsomorphismSecret> secret_;
  int j_ = -1;
};

class GraphOtReceiver : public protocol::Party {
 public:
  GraphOtReceiver(GraphOtConfig config, RandomStream rng);
  std::vector<session::Message> start() override { return {}; }
  std::vector<session::Message> receive(const session::Message& m) override;
  /// 0x00, or 0x01 followed by the G1 -> G2 permutation.
  Bytes private_output() const override;
  std::string summary() const override;

  int copy_index() const { return i_; }
  const std::optional<Permutation>& obtained() const { return obtained_; }
  /// Map G_i -> G_j derived in the same-graph branch.
  const std::optional<Permutation>& same_graph_map() const { return same_graph_map_; }

 private:
  GraphOtConfig config_;
  std::optional<Graph> g1_, g2_;
  std::optional<Permutation> sigma_;
  int i_ = -1;
  std::optional<Permutation> obtained_;
  std::optional<Permutation> same_graph_map_;
};

SessionResult graph_ot(const GraphOtConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                       Transport transport = Transport::InProcess);
session::FunctionalDefinition graph_ot_definition();
void verify_graph_ot(const session::Transcript& t);

// ---------------------------------------------------------------------------
// DLP-based 1C-2OT. The receiver chooses which of two k-bit secrets it gets.

/// Label hashed to the public element c.
inline constexpr std::string_view kDlpOtLabel = "tpc dlp-1of2-ot public element";

/// Public element c for the field prime p.
BigInt dlp_ot_element(const BigInt& p);

/// Receiver side of one transfer: x secret, beta_i = g^x, beta_{1-i} = c / g^x.
class DlpChooser {
 public:
  DlpChooser(const FieldContext& field, const BigInt& c, bool choice, RandomStream& rng);
  const BigInt& beta(int j) const { return beta_[j]; }
  bool choice() const { return choice_; }
  /// s_i = r_i XOR low k bits of alpha_i^x.
  BitString recover(const BigInt& alpha, const BitString& masked) const;

 private:
  BigInt p_;
  BigInt x_;
  bool choice_;
  std::array<BigInt, 2> beta_;
};

struct DlpOtReply {
  std::array<BigInt, 2> alpha;
  std::array<BitString, 2> masked;
};

/// Throws VerificationError unless beta0, beta1 are in [1, p-1] and beta0 * beta1 = c (mod p).
void check_dlp_keys(const FieldContext& field, const BigInt& c, const BigInt& beta0, const BigInt& beta1);
/// Sender side after check_dlp_keys: alpha_j = g^y_j, r_j = s_j XOR bits(beta_j^y_j).
DlpOtReply dlp_ot_respond(const FieldContext& field, const BigInt& beta0, const BigInt& beta1, const BitString& s0,
                          const BitString& s1, RandomStream& rng);
/// Low k bits of gamma's fixed-width encoding.
BitString dlp_mask(const BigInt& gamma, const BigInt& p, std::size_t k);

void write_dlp_keys(ByteWriter& w, const BigInt& beta0, const BigInt& beta1);
std::pair<BigInt, BigInt> read_dlp_keys(ByteReader& r);
void write_dlp_reply(ByteWriter& w, const DlpOtReply& reply);
/// Throws VerificationError when a masked string is not exactly k bits.
DlpOtReply read_dlp_reply(ByteReader& r, std::size_t k);

struct DlpOtConfig {
  std::size_t bits = 64;
  std::size_t k = 16;
  std::optional<FieldContext> field;
  std::optional<std::pair<BitString, BitString>> secrets;
  std::optional<bool> choice;
  /// Scripted receiver: sends beta0 = g^x0, beta1 = g^x1 with both logs known.
  bool cheat_structure = false;
  /// Scripted sender: masked strings one bit longer than announced.
  bool cheat_length = false;
};

const session::ProtocolInfo& dlp_ot_protocol();

class DlpOtSender : public protocol::Party {
 public:
  DlpOtSender(DlpOtConfig config, RandomStream rng);
  std::vector<session::Message> start() override;
  std::vector<session::Message> receive(const session::Message& m) override;
  Bytes private_output() const override { return {}; }
  std::string summary() const override;

  const FieldContext& field() const { return *field_; }
  const std::pair<BitString, BitString>& secrets() const { return secrets_; }

 private:
  DlpOtConfig config_;
  std::optional<FieldContext> field_;
  std::pair<BitString, BitString> secrets_;
};

class DlpOtReceiver : public protocol::Party {
 public:
  DlpOtReceiver(DlpOtConfig config, RandomStream rng);
  std::vector<session::Message> start() override { return {}; }
  std::vector<session::Message> receive(const session::Message& m) override;
  /// Choice byte followed by the recovered secret.
  Bytes private_output() const override;
  std::string summary() const override;

  bool choice() const { return choice_; }
  const std::optional<BitString>& recovered() const { return recovered_; }
  /// Discrete logs the receiver knows for the keys it sent (structural check).
  std::vector<BigInt> known_logs() const;

 private:
  DlpOtConfig config_;
  bool choice_;
  std::optional<FieldContext> field_;
  std::size_t k_ = 0;
  std::optional<DlpChooser> chooser_;
  std::array<BigInt, 2> cheat_logs_;
  std::optional<BitString> recovered_;
};

SessionResult dlp_1of2_ot(const DlpOtConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                          Transport transport = Transport::InProcess);
session::FunctionalDefinition dlp_ot_definition();
void verify_dlp_ot(const session::Transcript& t);

// ---------------------------------------------------------------------------
// Graph-based 1-out-of-2 OT and secret sale. The sender knows a Hamiltonian
// cycle in each of several mutually isomorphic public graphs; the receiver
// obtains the one it points to.

/// `count` relabelings of one Hamiltonian graph on n vertices, each with its witness.
std::vector<graphs::PlantedSolution> gen_sale_items(std::size_t count, std::size_t n, std::size_t noise_edges,
                                                    RandomStream& rng);

struct SecretSaleConfig {
  std::size_t items = 2;
  std::size_t n = 8;
  std::size_t noise_edges = 6;
  std::optional<std::vector<graphs::PlantedSolution>> solutions;
  std::optional<std::size_t> choice;
  /// Scripted sender: returns a vertex order that is not a cycle of the copy.
  bool cheat_invalid_solution = false;
};

const session::ProtocolInfo& graph_1of2_ot_protocol();
const session::ProtocolInfo& secret_sale_protocol();

class SaleSender : public protocol::Party {
 public:
  SaleSender(SecretSaleConfig config, RandomStream rng);
  std::vector<session::Message> start() override;
  std::vector<session::Message> receive(const session::Message& m) override;
  Bytes private_output() const override { return {}; }
  std::string summary() const override;

  const std::vector<graphs::PlantedSolution>& solutions() const { return solutions_; }
  /// Pointed copy as received (for the obliviousness check).
  const std::optional<Graph>& pointed_copy() const { return pointed_; }

 private:
  SecretSaleConfig config_;
  std::vector<graphs::PlantedSolution> solutions_;
  std::optional<Graph> pointed_;
};

class SaleReceiver : public protocol::Party {
 public:
  SaleReceiver(SecretSaleConfig config, RandomStream rng);
  std::vector<session::Message> start() override { return {}; }
  std::vector<session::Message> receive(const session::Message& m) override;
  /// 2-byte choice followed by the witness in the chosen public graph.
  Bytes private_output() const override;
  std::string summary() const override;

  std::size_t choice() const { return choice_; }
  const std::vector<Graph>& public_graphs() const { return graphs_; }
  const std::optional<std::vector<graphs::Vertex>>& witness() const { return witness_; }

 private:
  SecretSaleConfig config_;
  std::size_t choice_ = 0;
  std::vector<Graph> graphs_;
  std::optional<Permutation> tau_;
  std::optional<std::vector<graphs::Vertex>> witness_;
};

SessionResult secret_sale(const SecretSaleConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                          Transport transport = Transport::InProcess);
/// secret_sale with two items under the graph 1-out-of-2 protocol id.
SessionResult graph_1of2_ot(SecretSaleConfig config, std::uint64_t seed_a, std::uint64_t seed_b,
                            Transport transport = Transport::InProcess);
session::FunctionalDefinition secret_sale_definition();
void verify_secret_sale(const session::Transcript& t, const session::ProtocolInfo& protocol);

// ---------------------------------------------------------------------------
// OT from two 1-out-of-2 transfers. The receiver supplies isomorphic G1, G2;
// the sender builds H and sends f1: G1 -> H and f2: H -> G2 through two DLP
// 1C-2OT instances, each real share at a random position with a decoy.

struct ComposedOtConfig {
  std::size_t n = 6;
  std::size_t bits = 64;
  std::optional<FieldContext> field;
  std::optional<IsomorphismSecret> receiver_graphs;
  std::optional<std::array<bool, 2>> receiver_choices;
  std::optional<std::array<bool, 2>> sender_positions;
};

const session::ProtocolInfo& ot_from_two_1of2_protocol();

class ComposedOtSender : public protocol::Party {
 public:
  ComposedOtSender(ComposedOtConfig config, RandomStream rng);
  std::vector<session::Message> start() override;
  std::vector<session::Message> receive(const session::Message& m) override;
  Bytes private_output() const override { return {}; }
  std::string summary() const override;

  const std::array<bool, 2>& positions() const { return positions_; }
  const std::optional<Permutation>& f1() const { return f1_; }
  const std::optional<Permutation>& f2() const { return f2_; }

 private:
  ComposedOtConfig config_;
  std::optional<FieldContext> field_;
  std::array<bool, 2> positions_{};
  std::optional<Permutation> f1_, f2_;
};

class ComposedOtReceiver : public protocol::Party {
 public:
  ComposedOtReceiver(ComposedOtConfig config, RandomStream rng);
  std::vector<session::Message> start() override { return {}; }
  std::vector<session::Message> receive(const session::Message& m) override;
  /// 0x00, or 0x01 followed by the composed G1 -> G2 permutation.
  Bytes private_output() const override;
  std::string summary() const override;

  const std::array<bool, 2>& choices() const { return choices_; }
  const IsomorphismSecret& graphs() const { return *graphs_; }
  /// Both shares as received, whether real or decoy.
  const std::array<std::optional<Permutation>, 2>& shares() const { return shares_; }
  const std::optional<Permutation>& composed() const { return composed_; }

 private:
  ComposedOtConfig config_;
  std::array<bool, 2> choices_{};
  std::optional<IsomorphismSecret> graphs_;
  std::optional<FieldContext> field_;
  std::vector<DlpChooser> choosers_;
  std::array<std::optional<Permutation>, 2> shares_;
  std::optional<Permutation> composed_;
};

SessionResult ot_from_two_1of2(const ComposedOtConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                               Transport transport = Transport::InProcess);
session::FunctionalDefinition ot_from_two_1of2_definition();
void verify_ot_from_two_1of2(const session::Transcript& t);

}  // namespace tpc::oblivious
