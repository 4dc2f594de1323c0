#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpc/bitstring.hpp"
#include "tpc/digest.hpp"
#include "tpc/graphs.hpp"
#include "tpc/numtheory.hpp"
#include "tpc/oblivious.hpp"
#include "tpc/protocol.hpp"
#include "tpc/session.hpp"

/// Protocols built on oblivious transfer: coin flipping, secret exchange,
/// contract signing and the two-sided comparison family.
namespace tpc::derived {

using graphs::Graph;
using graphs::Permutation;
using numtheory::BlumModulus;
using numtheory::FieldContext;
using oblivious::IsomorphismSecret;
using session::SessionResult;
using session::Transport;

enum class Winner : std::uint8_t { A = 0, B = 1 };

/// Result of a coin toss as both parties see it.
struct CoinResult {
  bool outcome = false;  ///< the coin: parity of the revealed value
  Winner winner = Winner::A;
  std::vector<BigInt> proof_data;
};

/// Outcome byte, winner byte.
Bytes encode_coin(const CoinResult& r);

// ---------------------------------------------------------------------------
// Coin flipping over a Blum integer. B bets on the parity of y, where
// z = y^2 and y = x^2 (mod N) are fixed before the bet.

struct CoinFlipQrpConfig {
  std::size_t bits = 64;
  std::optional<BlumModulus> modulus;
  std::optional<BigInt> x;
  /// B's bet: false = even, true = odd.
  std::optional<bool> bet;
  /// Scripted A: one factor is 1 mod 4.
  bool cheat_non_blum = false;
  /// Scripted A: reveals y + 1 instead of y.
  bool cheat_wrong_y = false;
};

const session::ProtocolInfo& coin_flip_qrp_protocol();

/// Checks B applies to the opening; throws VerificationError naming the failed check.
void check_qrp_coin_opening(const BigInt& n, const BigInt& z, const BigInt& x, const BigInt& y, const BigInt& p,
                            const BigInt& q);

class CoinQrpA : public protocol::Party {
 public:
  CoinQrpA(CoinFlipQrpConfig config, RandomStream rng);
  std::vector<session::Message> start() override;
  std::vector<session::Message> receive(const session::Message& m) override;
  Bytes private_output() const override;
  std::string summary() const override;

  const BlumModulus& modulus() const { return *modulus_; }
  const BigInt& y() const { return y_; }
  const std::optional<CoinResult>& result() const { return result_; }

 private:
  CoinFlipQrpConfig config_;
  std::optional<BlumModulus> modulus_;
  BigInt x_, y_, z_;
  std::optional<CoinResult> result_;
};

class CoinQrpB : public protocol::Party {
 public:
  CoinQrpB(CoinFlipQrpConfig config, RandomStream rng);
  std::vector<session::Message> start() override { return {}; }
  std::vector<session::Message> receive(const session::Message& m) override;
  Bytes private_output() const override;
  std::string summary() const override;

  bool bet() const { return bet_; }
  const std::optional<CoinResult>& result() const { return result_; }

 private:
  CoinFlipQrpConfig config_;
  bool bet_ = false;
  BigInt n_, z_;
  std::optional<CoinResult> result_;
};

SessionResult coin_flip_qrp(const CoinFlipQrpConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                            Transport transport = Transport::InProcess);
session::FunctionalDefinition coin_flip_qrp_definition();
void verify_coin_flip_qrp(const session::Transcript& t);

// ---------------------------------------------------------------------------
// Coin flipping with h(x) = g^x mod p on {0, ..., p-2}. B bets on the parity of x.

struct CoinFlipGeneralConfig {
  std::size_t bits = 64;
  std::optional<FieldContext> field;
  std::optional<BigInt> x;
  std::optional<bool> bet;
  /// Scripted A: opens with x + 1.
  bool cheat_wrong_opening = false;
};

const session::ProtocolInfo& coin_flip_general_protocol();

class CoinGeneralA : public protocol::Party {
 public:
  CoinGeneralA(CoinFlipGeneralConfig config, RandomStream rng);
  std::vector<session::Message> start() override;
  std::vector<session::Message> receive(const session::Message& m) override;
  Bytes private_output() const override;
  std::string summary() const override;

  const BigInt& x() const { return x_; }
  const std::optional<CoinResult>& result() const { return result_; }

 private:
  CoinFlipGeneralConfig config_;
  std::optional<FieldContext> field_;
  BigInt x_;
  std::optional<CoinResult> result_;
};

class CoinGeneralB : public protocol::Party {
 public:
  CoinGeneralB(CoinFlipGeneralConfig config, RandomStream rng);
  std::vector<session::Message> start() override { return {}; }
  std::vector<session::Message> receive(const session::Message& m) override;
  Bytes private_output() const override;
  std::string summary() const override;

  bool bet() const { return bet_; }
  const std::optional<CoinResult>& result() const { return result_; }

 private:
  CoinFlipGeneralConfig config_;
  bool bet_ = false;
  std::optional<FieldContext> field_;
  BigInt y_;
  std::optional<CoinResult> result_;
};

SessionResult coin_flip_general(const CoinFlipGeneralConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                                Transport transport = Transport::InProcess);
session::FunctionalDefinition coin_flip_general_definition();
void verify_coin_flip_general(const session::Transcript& t);

// ---------------------------------------------------------------------------
// Graph-based secret exchange. Each round, each party challenges the other
// with a copy of one of the other's graphs and answers the counterpart's
// challenge, exactly as in graph OT, in both directions.

struct SecretExchangeConfig {
  std::size_t n = 6;
  std::size_t rounds = 10;
  std::optional<IsomorphismSecret> a_secret;
  std::optional<IsomorphismSecret> b_secret;
  /// Scripted A: answers B's challenges with a wrong isomorphism.
  bool cheat_a_wrong_isomorphism = false;
};

const session::ProtocolInfo& secret_exchange_protocol();

/// One side of the exchange; `role` decides who opens each round.
class ExchangeParty : public protocol::Party {
 public:
  ExchangeParty(session::Role role, SecretExchangeConfig config, RandomStream rng);
  std::vector<session::Message> start() override;
  std::vector<session::Message> receive(const session::Message& m) override;
  /// 0x00, or 0x01 followed by the counterpart's G1 -> G2 isomorphism.
  Bytes private_output() const override;
  std::string summary() const override;

  const IsomorphismSecret& own_secret() const { return *own_; }
  /// Per round: whether this party learned the counterpart's secret.
  const std::vector<bool>& round_success() const { return success_; }
  const std::optional<Permutation>& obtained() const { return obtained_; }
  /// Per round: which of the counterpart's graphs this party copied.
  const std::vector<int>& copy_indices() const { return copy_indices_; }
  /// Per round: which own graph this party's answer pointed to.
  const std::vector<int>& answer_indices() const { return answer_indices_; }

 private:
  std::vector<session::Message> send_copy();
  session::Message answer(const Graph& h);
  void absorb_answer(ByteReader& r);

  session::Role role_;
  SecretExchangeConfig config_;
  std::size_t rounds_ = 0;
  std::optional<IsomorphismSecret> own_;
  std::optional<Graph> other_g1_, other_g2_;
  std::size_t round_ = 0;
  int my_index_ = -1;
  std::optional<Permutation> sigma_;
  std::optional<Graph> pending_copy_;
  std::vector<bool> success_;
  std::vector<int> copy_indices_;
  std::vector<int> answer_indices_;
  std::optional<Permutation> obtained_;
};

SessionResult secret_exchange_graph(const SecretExchangeConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                                    Transport transport = Transport::InProcess);
session::FunctionalDefinition secret_exchange_definition();
void verify_secret_exchange(const session::Transcript& t);

// ---------------------------------------------------------------------------
// Contract signing by alternating Rabin OT of each party's factorization.
// Every payload starts with SHA-256 of the contract.

struct ContractSignConfig {
  std::string contract = "contract";
  std::size_t bits = 64;
  std::size_t max_rounds = 32;
  std::optional<BlumModulus> a_modulus;
  std::optional<BlumModulus> b_modulus;
  /// Scripted A: answers B's squares with a value that is not a root.
  bool cheat_a_non_root = false;
  /// B holds a different contract text.
  std::optional<std::string> b_contract;
};

const session::ProtocolInfo& contract_sign_protocol();

class ContractParty : public protocol::Party {
 public:
  ContractParty(session::Role role, ContractSignConfig config, RandomStream rng);
  std::vector<session::Message> start() override;
  std::vector<session::Message> receive(const session::Message& m) override;
  /// Signed byte, obtained byte, then the counterpart's factors when obtained.
  Bytes private_output() const override;
  std::string summary() const override;

  const BlumModulus& own_modulus() const { return *own_; }
  bool signed_contract() const { return signed_; }
  std::size_t rounds() const { return rounds_; }
  const std::optional<std::pair<BigInt, BigInt>>& obtained() const { return obtained_; }
  /// (x, returned root) for each transfer this party received.
  const std::vector<std::pair<BigInt, BigInt>>& received_roots() const { return roots_; }
  /// Roots this party sent as the transferring side.
  const std::vector<BigInt>& sent_roots() const { return sent_; }

 private:
  session::Message offer();
  session::Message square_for(const BigInt& n);
  session::Message root_for(ByteReader& r);
  void absorb_root(ByteReader& r);
  ByteReader open(const session::Message& m, const char* what);
  session::Message close();

  session::Role role_;
  ContractSignConfig config_;
  Sha256Digest hash_{};
  std::optional<BlumModulus> own_;
  BigInt other_n_;
  BigInt x_;
  bool other_done_ = false;
  bool signed_ = false;
  std::size_t rounds_ = 0;
  std::optional<std::pair<BigInt, BigInt>> obtained_;
  std::vector<std::pair<BigInt, BigInt>> roots_;
  std::vector<BigInt> sent_;
};

SessionResult contract_sign(const ContractSignConfig& config, std::uint64_t seed_a, std::uint64_t seed_b,
                            Transport transport = Transport::InProcess);
session::FunctionalDefinition contract_sign_definition();
/// `contract_hash` is the hex SHA-256 the payloads must carry.
void verify_contract_sign(const session::Transcript& t, const std::string& contract_hash);

// ---------------------------------------------------------------------------
// Two-sided comparison. For each instance, both parties run 1C-2OT of their
// k-bit masks selected by the other's secret bits and publish
// S = XOR(received masks) XOR XOR_i r_{i, s_i}. Equal sums mean "possibly
// equal" (verdict 0), different sums mean "different" (verdict 1).

struct TscpConfig {
  std::size_t bits = 64;
  std::size_t k = 32;
  std::optional<FieldContext> field;
  /// One entry per instance; all entries of both parties have the same length.
  std::vector<BitString> secret_a;
  std::vector<BitString> secret_b;
  /// Stop after the first instance whose sums differ (millionaires).
  bool stop_on_difference = false;
  /// Scripted A: sends 1C-2OT keys whose product is not c.
  bool cheat_a_bad_keys = false;
};

/// Public description of the run, sent in the set-up message.
struct TscpShape {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t instances = 0;
  bool stop_on_difference = false;
};

const session::ProtocolInfo& tscp_protocol();
const session::ProtocolInfo& byzantine_agreement_protocol();
const session::ProtocolInfo& string_verification_protocol();
const session::ProtocolInfo& millionaires_protocol();

/// Per-instance data each party holds.
struct TscpInstance {
  BitString secret;
  std::vector<std::array<BitString, 2>> masks;
  std::vector<BitString> received;
  BitString own_sum;
  BitString other_sum;
  bool differ = false;
};

class TscpParty : public protocol::Party {
 public:
  TscpParty(session::Role role, TscpConfig config, RandomStream rng);
  std::vector<session::Message> start() override;
  std::vector<session::Message> receive(const session::Message& m) override;
  /// Verdict byte: 0 possibly equal, 1 different. With stop_on_difference
  /// (millionaires), 0 when A is richer and 1 otherwise.
  Bytes private_output() const override;
  std::string summary() const override;

  const std::vector<TscpInstance>& instances() const { return instances_; }
  /// Index of the first instance whose sums differed.
  std::optional<std::size_t> first_difference() const;
  bool verdict_different() const { return first_difference().has_value(); }
  bool stops_on_difference() const { return shape_.stop_on_difference; }

 private:
  std::vector<session::Message> begin_instance();
  void prepare_instance();
  BitString sum_for(const TscpInstance& inst) const;
  bool instance_is_last(std::size_t idx) const;

  session::Role role_;
  TscpConfig config_;
  std::optional<FieldContext> field_;
  BigInt c_;
  TscpShape shape_;
  std::vector<BitString> secrets_;
  std::vector<TscpInstance> instances_;
  std::size_t current_ = 0;
  std::vector<oblivious::DlpChooser> choosers_;
};

/// y_A = y_B = verdict recomputed from both parties' masks and secrets.
session::FunctionalDefinition tscp_definition();

SessionResult tscp_general(const BitString& s_a, const BitString& s_b, std::size_t k, std::uint64_t seed_a,
                           std::uint64_t seed_b, Transport transport = Transport::InProcess,
                           std::size_t field_bits = 64);
SessionResult byzantine_agreement(bool bit_a, bool bit_b, std::uint64_t seed_a, std::uint64_t seed_b,
                                  Transport transport = Transport::InProcess, std::size_t field_bits = 64);
/// Strings of different lengths make B abort at set-up, before any transfer.
SessionResult string_verification(const BitString& s_a, const BitString& s_b, std::size_t k, std::uint64_t seed_a,
                                  std::uint64_t seed_b, Transport transport = Transport::InProcess,
                                  std::size_t field_bits = 64);
/// Verdict 0 when w_a > w_b, 1 otherwise.
SessionResult millionaires(std::uint64_t w_a, std::uint64_t w_b, std::size_t bit_width, std::size_t k,
                           std::uint64_t seed_a, std::uint64_t seed_b, Transport transport = Transport::InProcess,
                           std::size_t field_bits = 64);
SessionResult run_tscp(const session::ProtocolInfo& info, const TscpConfig& config, std::uint64_t seed_a,
                       std::uint64_t seed_b, Transport transport = Transport::InProcess);

/// Verdict bytes as decoded from a session: (A's, B's).
std::pair<int, int> tscp_verdicts(const SessionResult& r);

/// Millionaires result from the comparison verdict of the first differing
/// instance and the party's own bit there: 0 when A is richer, 1 otherwise.
session::FunctionalDefinition millionaires_definition();

void verify_tscp(const session::Transcript& t, const session::ProtocolInfo& protocol);

}  // namespace tpc::derived
