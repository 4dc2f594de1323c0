#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tpc/graphs.hpp"
#include "tpc/numtheory.hpp"
#include "tpc/protocol.hpp"
#include "tpc/session.hpp"

/// Challenge-response zero-knowledge proofs: square-root knowledge modulo N
/// and Hamiltonian-cycle knowledge, with rewinding simulators.
namespace tpc::zkproof {

using graphs::Graph;
using graphs::PlantedSolution;
using session::SessionResult;
using session::Transport;

inline constexpr std::size_t kDefaultRounds = 20;
inline constexpr std::size_t kMaxRounds = 255;
inline constexpr std::size_t kDefaultRetryBudget = 128;

/// v = s^2 mod N; the factors of N are not part of it.
struct QrpIdentity {
  BigInt n;
  BigInt s;
  BigInt v;
};

/// Throws InvalidArgument unless 0 < s < N and gcd(s, N) = 1.
QrpIdentity make_qrp_identity(const BigInt& n, const BigInt& s);
/// Trusted set-up: a fresh Blum modulus whose factors are dropped, and s with s^2 != 1.
QrpIdentity gen_qrp_identity(std::size_t bits, RandomStream& rng);

struct ZkVerdict {
  bool accepted = false;
  std::size_t rounds = 0;
  std::optional<std::size_t> failure_round;
  friend bool operator==(const ZkVerdict&, const ZkVerdict&) = default;
};

/// Accepted byte, m, failure round (0xff when none).
Bytes encode_verdict(const ZkVerdict& v);
std::optional<ZkVerdict> decode_verdict(const Bytes& b);

// Round interface shared by both proofs -------------------------------------

/// Prover side of one statement. commit() starts a round; respond() answers it.
class RoundProver {
 public:
  virtual ~RoundProver() = default;
  virtual Bytes statement() const = 0;
  virtual Bytes commit(RandomStream& rng) = 0;
  virtual Bytes respond(bool challenge) = 0;
  /// Whether respond(challenge) will verify in the current round.
  virtual bool can_answer(bool challenge) const = 0;
  virtual std::unique_ptr<RoundProver> clone() const = 0;
};

/// Verifier's public check for one round.
class RoundChecker {
 public:
  virtual ~RoundChecker() = default;
  /// Empty when the round verifies, otherwise the failed predicate.
  virtual std::optional<std::string> check(ByteView commitment, bool challenge, ByteView response) const = 0;
};

/// Produces (commitment, response) that verify for a guessed challenge,
/// from the statement alone.
class RoundSimulator {
 public:
  virtual ~RoundSimulator() = default;
  virtual std::pair<Bytes, Bytes> fake(bool guess, RandomStream& rng) const = 0;
};

/// Parses a statement; throws VerificationError when it is malformed.
using CheckerFactory = std::function<std::shared_ptr<const RoundChecker>(ByteReader& statement)>;

struct ZkScheme {
  const session::ProtocolInfo* info;
  std::uint8_t tag_base;
  CheckerFactory checker;
};

const session::ProtocolInfo& zkp_qrp_protocol();
const session::ProtocolInfo& zkp_qrp_cheat_protocol();
const session::ProtocolInfo& zkp_graph_protocol();
const session::ProtocolInfo& zkp_graph_cheat_protocol();

ZkScheme qrp_scheme(bool cheat = false);
ZkScheme graph_scheme(bool cheat = false);

class ZkProver : public protocol::Party {
 public:
  ZkProver(ZkScheme scheme, std::unique_ptr<RoundProver> prover, std::size_t m, RandomStream rng);
  std::vector<session::Message> start() override;
  std::vector<session::Message> receive(const session::Message& m) override;
  Bytes private_output() const override { return {}; }
  std::string summary() const override;

  const RoundProver& prover() const { return *prover_; }
  std::size_t rounds() const { return m_; }
  /// can_answer() for each challenge received, in order.
  const std::vector<bool>& answerable() const { return answerable_; }

 private:
  session::Message commitment();

  ZkScheme scheme_;
  std::unique_ptr<RoundProver> prover_;
  std::size_t m_;
  std::size_t round_ = 0;
  std::vector<bool> answerable_;
  std::optional<ZkVerdict> told_;
};

/// Honest verifier. Copyable so a simulator can rewind it.
class ZkVerifier : public protocol::Party {
 public:
  ZkVerifier(ZkScheme scheme, RandomStream rng);
  std::vector<session::Message> start() override { return {}; }
  std::vector<session::Message> receive(const session::Message& m) override;
  /// encode_verdict once finished.
  Bytes private_output() const override;
  std::string summary() const override;

  const std::vector<bool>& challenges() const { return challenges_; }
  const std::optional<ZkVerdict>& verdict() const { return verdict_; }

 private:
  ZkScheme scheme_;
  std::shared_ptr<const RoundChecker> checker_;
  std::size_t m_ = 0;
  std::size_t round_ = 0;
  std::optional<Bytes> commitment_;
  std::vector<bool> challenges_;
  std::optional<ZkVerdict> verdict_;
};

/// Runs the proof with the given prover strategy.
SessionResult run_zkp(const ZkScheme& scheme, const std::function<std::unique_ptr<RoundProver>(RandomStream&)>& make,
                      std::size_t m, std::uint64_t seed_a, std::uint64_t seed_b, Transport transport);
/// Verdict recomputed from which challenges the prover could answer.
session::FunctionalDefinition zkp_definition();
std::optional<ZkVerdict> zk_verdict(const SessionResult& r);
/// Replays every round check and the verifier's replies.
void verify_zkp(const session::Transcript& t, const ZkScheme& scheme);

// QRP proof -------------------------------------------------------------------

/// Honest prover: a = x^2, y = x s^c.
std::unique_ptr<RoundProver> qrp_prover(const QrpIdentity& id);
/// Knows only (N, v): commits a = x^2 v^-g for a guessed challenge g.
std::unique_ptr<RoundProver> qrp_cheat_prover(const BigInt& n, const BigInt& v);
/// y != 0 and y^2 = a v^c (mod N).
std::shared_ptr<const RoundChecker> qrp_checker(const BigInt& n, const BigInt& v);
std::unique_ptr<RoundSimulator> qrp_simulator(const BigInt& n, const BigInt& v);
Bytes qrp_statement(const BigInt& n, const BigInt& v);

struct QrpZkConfig {
  std::size_t bits = 64;
  std::size_t m = kDefaultRounds;
  std::optional<QrpIdentity> identity;
  bool cheat = false;
};

SessionResult qrp_zkp(const QrpZkConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                      Transport transport = Transport::InProcess);

/// Rewinds a prover after its commitment and answers both challenges;
/// returns s' with s'^2 = v (mod N).
BigInt extract_qrp_secret(const RoundProver& prover, const BigInt& n, RandomStream& rng);

// Graph proof -----------------------------------------------------------------

/// Honest prover: G' = pi(G); c = 0 reveals pi, c = 1 reveals pi(cycle).
std::unique_ptr<RoundProver> graph_prover(const PlantedSolution& planted);
/// Knows only G: commits a true copy or a fresh graph with a planted cycle.
std::unique_ptr<RoundProver> graph_cheat_prover(const Graph& g);
std::shared_ptr<const RoundChecker> graph_checker(const Graph& g);
std::unique_ptr<RoundSimulator> graph_simulator(const Graph& g);
Bytes graph_statement(const Graph& g);

struct GraphZkConfig {
  std::size_t n = 8;
  std::size_t noise_edges = 4;
  std::size_t m = kDefaultRounds;
  std::optional<PlantedSolution> planted;
  bool cheat = false;
};

SessionResult graph_zkp(const GraphZkConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                        Transport transport = Transport::InProcess);

/// Hamiltonian cycle of G from the answers to both challenges on one commitment.
std::vector<graphs::Vertex> extract_graph_witness(const RoundProver& prover, RandomStream& rng);

// Simulation ------------------------------------------------------------------

struct Simulation {
  session::Transcript transcript;
  /// Attempts per round, including the successful one.
  std::vector<std::size_t> tries;
  ZkVerdict verdict;
};

/// Drives an honest verifier seeded with `verifier_seed`, rewinding it
/// whenever its challenge differs from the simulator's guess. Throws Error
/// when a round exhausts `budget` attempts.
Simulation simulate(const ZkScheme& scheme, const Bytes& statement, const RoundSimulator& sim, std::size_t m,
                    std::uint64_t verifier_seed, std::uint64_t simulator_seed,
                    std::size_t budget = kDefaultRetryBudget);
Simulation qrp_zkp_simulate(const BigInt& n, const BigInt& v, std::size_t m, std::uint64_t verifier_seed,
                            std::uint64_t simulator_seed, std::size_t budget = kDefaultRetryBudget);
Simulation graph_zkp_simulate(const Graph& g, std::size_t m, std::uint64_t verifier_seed, std::uint64_t simulator_seed,
                              std::size_t budget = kDefaultRetryBudget);

}  // namespace tpc::zkproof
