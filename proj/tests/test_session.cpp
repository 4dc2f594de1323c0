#include <gtest/gtest.h>

#include <set>

#include "tpc/catalog.hpp"
#include "tpc/commitment.hpp"
#include "tpc/derived.hpp"
#include "tpc/errors.hpp"
#include "tpc/oblivious.hpp"
#include "tpc/statistics.hpp"
#include "tpc/transcript_log.hpp"
#include "tpc/zkproof.hpp"

using namespace tpc;
using namespace tpc::session;

namespace {

const numtheory::BlumModulus kN21(3, 7);

oblivious::RabinOtConfig rabin21(std::size_t root_index) {
  oblivious::RabinOtConfig c;
  c.modulus = kN21;
  c.receiver_x = BigInt(2);
  c.root_index = root_index;
  return c;
}

/// Wraps a party and appends one byte to every payload it sends.
class PaddingParty : public PartyMachine {
 public:
  explicit PaddingParty(std::unique_ptr<PartyMachine> inner) : inner_(std::move(inner)) {}
  std::vector<Message> start() override { return pad(inner_->start()); }
  std::vector<Message> receive(const Message& m) override { return pad(inner_->receive(m)); }
  bool finished() const override { return inner_->finished(); }
  Bytes private_output() const override { return inner_->private_output(); }
  std::string summary() const override { return inner_->summary(); }

 private:
  static std::vector<Message> pad(std::vector<Message> ms) {
    for (auto& m : ms) m.payload.push_back(0);
    return ms;
  }
  std::unique_ptr<PartyMachine> inner_;
};

struct FactoryPair {
  std::string name;
  const ProtocolInfo* info;
  PartyFactory a, b;
};

template <class T, class C>
PartyFactory factory(C config) {
  return [config](RandomStream r) { return std::make_unique<T>(config, std::move(r)); };
}

template <class T, class C>
PartyFactory role_factory(Role role, C config) {
  return [role, config](RandomStream r) { return std::make_unique<T>(role, config, std::move(r)); };
}

std::vector<FactoryPair> every_protocol() {
  using namespace oblivious;
  using namespace derived;
  std::vector<FactoryPair> out;

  RabinOtConfig rabin;
  rabin.bits = 32;
  out.push_back({"rabin", &rabin_ot_protocol(), factory<RabinOtSender>(rabin), factory<RabinOtReceiver>(rabin)});

  GraphOtConfig got;
  out.push_back({"graph-ot", &graph_ot_protocol(), factory<GraphOtSender>(got), factory<GraphOtReceiver>(got)});

  DlpOtConfig dlp;
  dlp.bits = 32;
  dlp.k = 8;
  out.push_back({"dlp", &dlp_ot_protocol(), factory<DlpOtSender>(dlp), factory<DlpOtReceiver>(dlp)});

  SecretSaleConfig sale;
  sale.items = 3;
  out.push_back({"sale", &secret_sale_protocol(), factory<SaleSender>(sale), factory<SaleReceiver>(sale)});

  ComposedOtConfig comp;
  comp.bits = 32;
  out.push_back({"composed", &ot_from_two_1of2_protocol(), factory<ComposedOtSender>(comp),
                 factory<ComposedOtReceiver>(comp)});

  CoinFlipQrpConfig cq;
  cq.bits = 32;
  out.push_back({"coin-qrp", &coin_flip_qrp_protocol(), factory<CoinQrpA>(cq), factory<CoinQrpB>(cq)});

  CoinFlipGeneralConfig cg;
  cg.bits = 32;
  out.push_back({"coin-general", &coin_flip_general_protocol(), factory<CoinGeneralA>(cg), factory<CoinGeneralB>(cg)});

  SecretExchangeConfig se;
  se.rounds = 4;
  out.push_back({"exchange", &secret_exchange_protocol(), role_factory<ExchangeParty>(Role::A, se),
                 role_factory<ExchangeParty>(Role::B, se)});

  ContractSignConfig cs;
  cs.bits = 32;
  out.push_back({"contract", &contract_sign_protocol(), role_factory<ContractParty>(Role::A, cs),
                 role_factory<ContractParty>(Role::B, cs)});

  TscpConfig ts;
  ts.bits = 32;
  ts.k = 4;
  ts.secret_a = {BitString::parse("1010"), BitString::parse("0110")};
  ts.secret_b = {BitString::parse("1010"), BitString::parse("0111")};
  out.push_back({"tscp", &tscp_protocol(), role_factory<TscpParty>(Role::A, ts), role_factory<TscpParty>(Role::B, ts)});

  for (auto scheme : {commitment::Scheme::Qrp, commitment::Scheme::Dlp, commitment::Scheme::Graph}) {
    commitment::BcConfig bc;
    bc.scheme = scheme;
    bc.bits = 32;
    out.push_back({"bc-" + std::string(commitment::to_string(scheme)), &commitment::bc_protocol(bc),
                   factory<commitment::BcCommitter>(bc), factory<commitment::BcReceiver>(bc)});
  }
  commitment::BcConfig qnr;
  qnr.qnr_proof = true;
  qnr.qnr_rounds = 8;
  qnr.bits = 32;
  out.push_back({"bc-qnr", &commitment::bc_protocol(qnr), factory<commitment::BcCommitter>(qnr),
                 factory<commitment::BcReceiver>(qnr)});

  RandomStream idr(99);
  const zkproof::QrpIdentity id = zkproof::gen_qrp_identity(32, idr);
  const zkproof::ZkScheme qs = zkproof::qrp_scheme();
  out.push_back({"zkp-qrp", qs.info,
                 [qs, id](RandomStream r) {
                   return std::make_unique<zkproof::ZkProver>(qs, zkproof::qrp_prover(id), 6, std::move(r));
                 },
                 [qs](RandomStream r) { return std::make_unique<zkproof::ZkVerifier>(qs, std::move(r)); }});
  const auto planted = graphs::gen_hamiltonian_graph(7, 4, idr);
  const zkproof::ZkScheme gs = zkproof::graph_scheme();
  out.push_back({"zkp-graph", gs.info,
                 [gs, planted](RandomStream r) {
                   return std::make_unique<zkproof::ZkProver>(gs, zkproof::graph_prover(planted), 6, std::move(r));
                 },
                 [gs](RandomStream r) { return std::make_unique<zkproof::ZkVerifier>(gs, std::move(r)); }});
  return out;
}

}  // namespace

TEST(Codec, EmptyPayloadIsFiveBytes) {
  EXPECT_EQ(encode_message(Message{0x42, {}}).size(), 5u);
  EXPECT_EQ(encode_message(Message{0x42, {}}), (Bytes{0x42, 0, 0, 0, 0}));
}

TEST(Codec, RandomRoundTrips) {
  RandomStream rng(1);
  for (int i = 0; i < 10000; ++i) {
    Message m;
    m.tag = static_cast<std::uint8_t>(rng.below(256));
    m.payload.resize(rng.below(200));
    for (auto& b : m.payload) b = static_cast<std::uint8_t>(rng.below(256));
    const Bytes f = encode_message(m);
    ASSERT_EQ(f.size(), 5 + m.payload.size());
    ASSERT_EQ(decode_message(f), m);
  }
}

TEST(Codec, FramingErrors) {
  Bytes f = encode_message(Message{1, {1, 2, 3}});
  EXPECT_THROW(decode_message(Bytes(f.begin(), f.end() - 1)), FramingError);
  EXPECT_THROW(decode_message(Bytes(f.begin(), f.begin() + 4)), FramingError);
  Bytes extra = f;
  extra.push_back(9);
  EXPECT_THROW(decode_message(extra), FramingError);
  Bytes huge{1, 0xff, 0xff, 0xff, 0xff};
  EXPECT_THROW(decode_message(huge), FramingError);
  EXPECT_THROW(decode_message(encode_message(Message{0xee, {}}), &oblivious::rabin_ot_protocol().tags), FramingError);
}

TEST(Codec, SingleByteCorruptionNeverDecodesToTheOriginal) {
  RandomStream rng(2);
  for (int i = 0; i < 2000; ++i) {
    Message m{static_cast<std::uint8_t>(rng.below(256)), Bytes(1 + rng.below(40))};
    for (auto& b : m.payload) b = static_cast<std::uint8_t>(rng.below(256));
    Bytes f = encode_message(m);
    f[rng.below(f.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255));
    try {
      ASSERT_NE(decode_message(f), m);
    } catch (const FramingError&) {
    }
  }
}

TEST(RabinTrace, Root16YieldsFactors) {
  const auto r = oblivious::rabin_ot(rabin21(2), 1, 2);
  ASSERT_TRUE(r.ok());
  const auto& b = r.party<oblivious::RabinOtReceiver>(Role::B);
  EXPECT_EQ(r.party<oblivious::RabinOtSender>(Role::A).sent_root(), BigInt(16));
  ASSERT_TRUE(b.factors().has_value());
  EXPECT_EQ(*b.factors(), (std::pair<BigInt, BigInt>{3, 7}));
  EXPECT_TRUE(check_correctness(r, oblivious::rabin_ot_definition()));
}

TEST(RabinTrace, Root19YieldsNothing) {
  const auto r = oblivious::rabin_ot(rabin21(3), 1, 2);
  ASSERT_TRUE(r.ok());
  EXPECT_FALSE(r.party<oblivious::RabinOtReceiver>(Role::B).factors().has_value());
  EXPECT_EQ(r.b.private_output, Bytes{0});
  EXPECT_TRUE(check_correctness(r, oblivious::rabin_ot_definition()));
}

TEST(RabinTrace, NonRootIsFlaggedAtVerification) {
  auto c = rabin21(0);
  c.forced_root = BigInt(7);
  const auto r = oblivious::rabin_ot(c, 1, 2);
  ASSERT_TRUE(r.abort.has_value());
  EXPECT_EQ(r.abort->kind, AbortKind::Verification);
  EXPECT_EQ(r.abort->detected_by, Role::B);
  EXPECT_EQ(r.abort->step_label, "Response");
  EXPECT_EQ(r.abort->step_index, 2u);
  EXPECT_FALSE(check_correctness(r, oblivious::rabin_ot_definition()));
}

TEST(RabinTrace, WrongLengthPayloadAbortsWithFraming) {
  const auto cfg = rabin21(2);
  const auto r = run_session(
      oblivious::rabin_ot_protocol(),
      [&](RandomStream s) { return std::make_unique<PaddingParty>(std::make_unique<oblivious::RabinOtSender>(cfg, std::move(s))); },
      [&](RandomStream s) { return std::make_unique<oblivious::RabinOtReceiver>(cfg, std::move(s)); }, 1, 2);
  ASSERT_TRUE(r.abort.has_value());
  EXPECT_EQ(r.abort->kind, AbortKind::Framing);
  EXPECT_EQ(r.abort->step_index, 0u);
}

TEST(Determinism, EveryCatalogProtocolAcrossTransports) {
  for (const auto& e : catalog::entries()) {
    SCOPED_TRACE(e.id);
    const auto x = catalog::run(e, {}, 11, 12, Transport::InProcess);
    const auto y = catalog::run(e, {}, 11, 12, Transport::InProcess);
    const auto z = catalog::run(e, {}, 11, 12, Transport::Loopback);
    ASSERT_TRUE(x.result.ok());
    EXPECT_EQ(x.result.transcript.serialize(), y.result.transcript.serialize());
    EXPECT_EQ(x.result.transcript.serialize(), z.result.transcript.serialize());
    EXPECT_EQ(x.result.a.private_output, z.result.a.private_output);
    EXPECT_EQ(x.result.b.private_output, z.result.b.private_output);
    EXPECT_EQ(x.params, z.params);
    const auto other = catalog::run(e, {}, 21, 22, Transport::InProcess);
    EXPECT_NE(x.result.transcript.serialize(), other.result.transcript.serialize());
  }
}

TEST(Correctness, EveryCatalogProtocolHonestRun) {
  for (const auto& e : catalog::entries()) {
    if (e.id.find("cheat") != std::string::npos) continue;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto out = catalog::run(e, {}, 100 + s, 200 + s);
      const auto verdict = check_correctness(out.result, e.definition);
      EXPECT_TRUE(verdict) << e.id << ": " << verdict.diagnostic;
    }
  }
}

TEST(Fairness, EveryCatalogProtocol) {
  for (const auto& e : catalog::entries()) {
    const auto v = check_fairness(*e.info);
    EXPECT_TRUE(v) << v.diagnostic;
  }
  ProtocolInfo bad{"x", "x", "x", {{1, Direction::AtoB, "Lunch", "m"}}, "bits", "bits"};
  EXPECT_FALSE(check_fairness(bad));
  ProtocolInfo hidden{"x", "x", "x", {{1, Direction::AtoB, "Set-up", "m"}}, "", "bits"};
  EXPECT_FALSE(check_fairness(hidden));
}

TEST(ViewSufficiency, EveryProtocol) {
  for (const auto& p : every_protocol()) {
    for (std::uint64_t s = 0; s < 4; ++s) {
      SCOPED_TRACE(p.name + " seed " + std::to_string(s));
      const auto r = run_session(*p.info, p.a, p.b, 40 + s, 80 + s);
      ASSERT_TRUE(r.ok()) << r.abort->reason;
      EXPECT_TRUE(replay_matches(p.a, r.a));
      EXPECT_TRUE(replay_matches(p.b, r.b));
    }
  }
}

TEST(ViewSufficiency, AbortingPartyReplaysToSameState) {
  auto c = rabin21(0);
  c.forced_root = BigInt(7);
  const auto r = oblivious::rabin_ot(c, 1, 2);
  ASSERT_FALSE(r.ok());
  const PartyFactory b = [&](RandomStream s) { return std::make_unique<oblivious::RabinOtReceiver>(c, std::move(s)); };
  EXPECT_TRUE(replay_matches(b, r.b));
}

TEST(Distribution, DeterministicSourceHasOneBin) {
  const TranscriptSource src = [](std::uint64_t, std::uint64_t) {
    Transcript t;
    t.append({Direction::AtoB, "Set-up", Message{1, {1, 2}}});
    return t;
  };
  const auto table = transcript_distribution(src, Role::B, 1000);
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table.begin()->second, 1000u);
  EXPECT_THROW(transcript_distribution(src, Role::B, 999), InvalidArgument);
}

TEST(Distribution, DisjointSeedRangesAgree) {
  const TranscriptSource src = [](std::uint64_t sa, std::uint64_t sb) {
    oblivious::RabinOtConfig c;
    c.modulus = kN21;
    return oblivious::rabin_ot(c, sa, sb).transcript;
  };
  const auto t1 = transcript_distribution(src, Role::B, 20000, 0);
  const auto t2 = transcript_distribution(src, Role::B, 20000, 1'000'000);
  EXPECT_EQ(t1.size(), 12u);  // three squares, four roots each
  const auto chi = stats::chi_square_homogeneity(t1, t2);
  EXPECT_GT(chi.p_value, 0.01) << chi.statistic << " on " << chi.dof;
}

TEST(Distribution, TrialSeedsAreDistinct) {
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  for (std::size_t i = 0; i < 10000; ++i) ASSERT_TRUE(seen.insert(trial_seeds(7, i)).second);
  EXPECT_EQ(trial_seeds(7, 3), trial_seeds(7, 3));
}

TEST(TranscriptLog, FormatParseRoundTrip) {
  const auto& e = *catalog::find("rabin-ot");
  const auto out = catalog::run(e, {{"bits", "32"}}, 1, 2);
  const TranscriptLog log = catalog::make_log(e, out);
  const std::string text = format_log(log);
  const TranscriptLog back = parse_log(text);
  EXPECT_EQ(back.protocol, "rabin-ot");
  EXPECT_EQ(back.transcript, out.result.transcript);
  EXPECT_EQ(back.params, log.params);
  EXPECT_EQ(back.session_id, compute_session_id(back));
  EXPECT_EQ(format_log(back), text);
  EXPECT_NE(text.find("# end 3\n"), std::string::npos);
  EXPECT_NO_THROW(catalog::verify_log(back));
}

TEST(TranscriptLog, TruncationIsFraming) {
  const auto& e = *catalog::find("coin-flip-qrp");
  const std::string text = format_log(catalog::make_log(e, catalog::run(e, {{"bits", "32"}}, 3, 4)));
  // Dropping whole trailing lines, or cutting mid-line.
  std::size_t pos = text.size() - 1;
  for (int cut = 0; cut < 4; ++cut) {
    pos = text.rfind('\n', pos - 1);
    EXPECT_THROW(parse_log(text.substr(0, pos + 1)), FramingError);
  }
  for (std::size_t len : {text.size() - 1, text.size() / 2, std::size_t{10}, std::size_t{0}})
    EXPECT_THROW(parse_log(text.substr(0, len)), FramingError);
}

TEST(TranscriptLog, RejectsStructuralDamage) {
  const auto& e = *catalog::find("rabin-ot");
  const std::string text = format_log(catalog::make_log(e, catalog::run(e, {{"bits", "32"}}, 1, 2)));
  auto replace = [&](std::string_view from, std::string_view to) {
    std::string t = text;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_THROW(parse_log(replace("# end 3", "# end 4")), FramingError);
  EXPECT_THROW(parse_log(replace("# end 3", "# end 03")), FramingError);
  EXPECT_THROW(parse_log(replace("A->B", "A=>B")), FramingError);
  EXPECT_THROW(parse_log(replace("# tpc-transcript 1", "# tpc-transcript 2")), FramingError);
  TranscriptLog unknown = parse_log(text);
  unknown.protocol = "no-such-protocol";
  EXPECT_THROW(catalog::verify_log(unknown), FramingError);
}
