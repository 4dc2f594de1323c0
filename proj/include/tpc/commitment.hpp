#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "tpc/bigint.hpp"
#include "tpc/bytes.hpp"
#include "tpc/graphs.hpp"
#include "tpc/numtheory.hpp"
#include "tpc/protocol.hpp"
#include "tpc/random.hpp"
#include "tpc/session.hpp"

/// Bit commitments over quadratic residuosity, discrete logs and graph
/// isomorphism, with a shared commit/open/verify lifecycle.
namespace tpc::commitment {

using graphs::Graph;
using graphs::Permutation;
using numtheory::BlumModulus;
using numtheory::FieldContext;
using session::CheckResult;

enum class Scheme : std::uint8_t { Qrp = 1, Dlp = 2, Graph = 3 };
std::string_view to_string(Scheme s);

/// Public parameters and the value carrier the receiver holds until opening.
///  qrp:   params [N][y], witness [c]
///  dlp:   params field, witness [y]
///  graph: params [G][H], witness [copy]
struct Commitment {
  Scheme scheme = Scheme::Qrp;
  Bytes public_params;
  Bytes witness;
  friend bool operator==(const Commitment&, const Commitment&) = default;
};

/// Committed value plus the randomness that reproduces the witness.
///  qrp:   value b, randomness [r][p][q]
///  dlp:   value x, randomness empty
///  graph: value b, randomness permutation
struct Opening {
  BigInt value;
  Bytes randomness;
  friend bool operator==(const Opening&, const Opening&) = default;
};

/// Pure and deterministic; the diagnostic names the failed predicate.
CheckResult verify(const Commitment& c, const Opening& o);

// QRP ------------------------------------------------------------------------

Commitment qrp_commitment(const BigInt& n, const BigInt& y, const BigInt& c);
/// c = r^2 y^b mod N.
BigInt qrp_witness(bool b, const BigInt& r, const BigInt& y, const BigInt& n);

/// Holds the factorization. Opening reveals p and q, so one committer
/// commits exactly once.
class QrpCommitter {
 public:
  /// y must be a non-residue with Jacobi symbol 1.
  QrpCommitter(BlumModulus modulus, BigInt y);
  /// Fresh modulus of `bits` bits and a sampled y.
  static QrpCommitter generate(std::size_t bits, RandomStream& rng);
  /// Skips the checks on y; scripted cheating committers only.
  static QrpCommitter unchecked(BlumModulus modulus, BigInt y);

  const BlumModulus& modulus() const { return modulus_; }
  const BigInt& y() const { return y_; }

  /// Throws Error when called a second time.
  Commitment commit(bool b, RandomStream& rng);
  Commitment commit_with(bool b, const BigInt& r);
  /// Throws Error before commit.
  Opening open() const;
  /// b and r only, for receivers that were convinced y is a non-residue interactively.
  std::pair<bool, BigInt> open_without_factors() const;

 private:
  struct Unchecked {};
  QrpCommitter(BlumModulus modulus, BigInt y, Unchecked) : modulus_(std::move(modulus)), y_(std::move(y)) {}

  BlumModulus modulus_;
  BigInt y_;
  std::optional<std::pair<bool, BigInt>> committed_;
};

/// c = r^2 y^b with jacobi(y, N) = 1; the non-residuosity of y is not checked.
CheckResult verify_qrp_without_factors(const Commitment& c, bool b, const BigInt& r);

// DLP ------------------------------------------------------------------------

/// y = g^x mod p; throws InvalidArgument unless 1 < x < p-1.
Commitment dlp_commit(const BigInt& x, const FieldContext& field);
Opening dlp_open(const BigInt& x);

// Graph ----------------------------------------------------------------------

struct GraphCommitted {
  Commitment commitment;
  Opening opening;
};

/// Throws InvalidArgument unless the degree sequences of g and h differ.
GraphCommitted graph_commit(bool b, const Graph& g, const Graph& h, RandomStream& rng);
GraphCommitted graph_commit_with(bool b, const Graph& g, const Graph& h, const Permutation& pi);

// Sessions -------------------------------------------------------------------

struct BcConfig {
  Scheme scheme = Scheme::Qrp;
  /// qrp only: y is shown to be a non-residue interactively and p, q stay secret.
  bool qnr_proof = false;
  std::size_t qnr_rounds = 20;
  std::size_t bits = 64;
  std::size_t n = 6;
  /// Bit for qrp and graph, exponent for dlp; random when absent.
  std::optional<BigInt> value;
  std::optional<BlumModulus> modulus;
  std::optional<BigInt> y;
  std::optional<FieldContext> field;
  std::optional<std::pair<Graph, Graph>> graphs;
  /// Scripted A: opens with the other bit (or x + 1 for dlp) and the original randomness.
  bool cheat_flip_opening = false;
  /// Scripted A (qnr variant): y is a square; A guesses the challenge bits.
  bool cheat_residue_y = false;
};

const session::ProtocolInfo& bc_qrp_protocol();
const session::ProtocolInfo& bc_qrp_qnr_protocol();
const session::ProtocolInfo& bc_dlp_protocol();
const session::ProtocolInfo& bc_graph_protocol();
const session::ProtocolInfo& bc_protocol(const BcConfig& config);

class BcCommitter : public protocol::Party {
 public:
  BcCommitter(BcConfig config, RandomStream rng);
  std::vector<session::Message> start() override;
  std::vector<session::Message> receive(const session::Message& m) override;
  Bytes private_output() const override { return {}; }
  std::string summary() const override;

  const BigInt& value() const { return value_; }
  Scheme scheme() const { return config_.scheme; }

 private:
  session::Message commitment_message();

  BcConfig config_;
  BigInt value_;
  std::optional<QrpCommitter> qrp_;
  std::optional<FieldContext> field_;
  std::optional<GraphCommitted> graph_;
  std::optional<Commitment> commitment_;
  std::optional<Opening> opening_;
  std::size_t qnr_answered_ = 0;
};

class BcReceiver : public protocol::Party {
 public:
  BcReceiver(BcConfig config, RandomStream rng);
  std::vector<session::Message> start() override { return {}; }
  std::vector<session::Message> receive(const session::Message& m) override;
  /// The opened value (u8 for bits, integer encoding for dlp).
  Bytes private_output() const override;
  std::string summary() const override;

  const std::optional<BigInt>& opened() const { return opened_; }

 private:
  std::vector<session::Message> next_qnr_challenge();

  BcConfig config_;
  Scheme scheme_ = Scheme::Qrp;
  Bytes params_;
  std::size_t qnr_rounds_ = 0;
  std::size_t qnr_round_ = 0;
  int qnr_bit_ = -1;
  std::optional<Commitment> commitment_;
  std::optional<BigInt> opened_;
};

session::SessionResult bit_commitment(const BcConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                                      session::Transport transport = session::Transport::InProcess);
/// y_B = A's committed value.
session::FunctionalDefinition bit_commitment_definition();
void verify_bit_commitment(const session::Transcript& t, const session::ProtocolInfo& protocol);

Bytes encode_value(Scheme s, const BigInt& v);

}  // namespace tpc::commitment
