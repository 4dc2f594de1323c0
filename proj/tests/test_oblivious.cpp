#include <gtest/gtest.h>

#include <map>

#include "tpc/errors.hpp"
#include "tpc/oblivious.hpp"
#include "tpc/statistics.hpp"

using namespace tpc;
using namespace tpc::oblivious;
using session::AbortKind;
using session::Role;

namespace {

const BlumModulus kN21(3, 7);

stats::Proportion count(std::size_t trials, const std::function<bool(std::size_t)>& hit) {
  std::vector<char> out(trials);
  stats::parallel_for(trials, [&](std::size_t i) { out[i] = hit(i) ? 1 : 0; });
  stats::Proportion p{0, trials};
  for (char c : out) p.successes += static_cast<std::size_t>(c);
  return p;
}

FieldContext small_field(std::uint64_t seed, std::size_t bits = 32) {
  RandomStream r(seed);
  return numtheory::gen_field(bits, r);
}

}  // namespace

// Rabin ---------------------------------------------------------------------

TEST(RabinOt, HandTraces) {
  RabinOtConfig c;
  c.modulus = kN21;
  c.receiver_x = BigInt(2);
  c.root_index = 2;
  auto r = rabin_ot(c, 5, 6);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.party<RabinOtSender>(Role::A).sent_root(), BigInt(16));
  EXPECT_EQ(gcd(BigInt(18), BigInt(21)), 3);
  EXPECT_EQ(r.party<RabinOtReceiver>(Role::B).factors(), (std::pair<BigInt, BigInt>{3, 7}));
  c.root_index = 3;
  r = rabin_ot(c, 5, 6);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.party<RabinOtSender>(Role::A).sent_root(), BigInt(19));
  EXPECT_FALSE(r.party<RabinOtReceiver>(Role::B).factors().has_value());
}

TEST(RabinOt, SuccessRateIsOneHalf) {
  RabinOtConfig c;
  c.bits = 64;
  const auto p = count(10000, [&](std::size_t i) {
    const auto [sa, sb] = session::trial_seeds(1, i);
    return rabin_ot(c, sa, sb).party<RabinOtReceiver>(Role::B).factors().has_value();
  });
  EXPECT_NEAR(p.rate(), 0.5, 0.02);
}

TEST(RabinOt, SquareSeenBySenderIsIndependentOfOutcome) {
  std::map<std::string, std::size_t> success, failure;
  for (long x = 1; x < 21; ++x) {
    if (gcd(BigInt(x), BigInt(21)) != 1) continue;
    for (std::uint64_t s = 0; s < 400; ++s) {
      RabinOtConfig c;
      c.modulus = kN21;
      c.receiver_x = BigInt(x);
      const auto r = rabin_ot(c, s * 7919 + static_cast<std::uint64_t>(x), s);
      ASSERT_TRUE(r.ok());
      const std::string y = to_hex(r.transcript[1].message.payload);
      ++(r.party<RabinOtReceiver>(Role::B).factors() ? success : failure)[y];
    }
  }
  EXPECT_EQ(success.size(), 3u);
  EXPECT_EQ(failure.size(), 3u);
  EXPECT_GT(stats::chi_square_homogeneity(success, failure).p_value, 0.01);
}

TEST(RabinOt, CheatingRootsAreCaught) {
  for (long fake : {0, 1, 3, 7, 20}) {
    RabinOtConfig c;
    c.modulus = kN21;
    c.receiver_x = BigInt(2);
    c.forced_root = BigInt(fake);
    const auto r = rabin_ot(c, 1, 1);
    ASSERT_TRUE(r.abort.has_value()) << fake;
    EXPECT_EQ(r.abort->detected_by, Role::B);
    EXPECT_THROW(verify_rabin_ot(r.transcript), Error);
  }
}

// Graph OT ------------------------------------------------------------------

TEST(GraphOt, SuccessRateIsOneHalf) {
  GraphOtConfig c;
  const auto p = count(10000, [&](std::size_t i) {
    const auto [sa, sb] = session::trial_seeds(2, i);
    return graph_ot(c, sa, sb).party<GraphOtReceiver>(Role::B).obtained().has_value();
  });
  EXPECT_NEAR(p.rate(), 0.5, 0.02);
}

TEST(GraphOt, BothBranches) {
  RandomStream rng(3);
  GraphOtConfig c;
  c.secret = gen_isomorphism_secret(6, rng);
  for (int i : {0, 1})
    for (int j : {0, 1}) {
      c.receiver_index = i;
      c.sender_index = j;
      const auto r = graph_ot(c, 10, 20);
      ASSERT_TRUE(r.ok());
      const auto& b = r.party<GraphOtReceiver>(Role::B);
      if (i == j) {
        EXPECT_FALSE(b.obtained().has_value());
        ASSERT_TRUE(b.same_graph_map().has_value());
        EXPECT_EQ(*b.same_graph_map(), graphs::Permutation::identity(6));
      } else {
        ASSERT_TRUE(b.obtained().has_value());
        EXPECT_EQ(apply_perm(c.secret->g1, *b.obtained()), c.secret->g2);
        EXPECT_EQ(*b.obtained(), c.secret->pi);
      }
    }
}

TEST(GraphOt, WrongIsomorphismIsCaught) {
  GraphOtConfig c;
  c.cheat_wrong_isomorphism = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto r = graph_ot(c, s, s + 100);
    ASSERT_TRUE(r.abort.has_value());
    EXPECT_EQ(r.abort->kind, AbortKind::Verification);
    EXPECT_EQ(r.abort->detected_by, Role::B);
  }
}

// DLP 1C-2OT ----------------------------------------------------------------

TEST(DlpOt, KeyProductIsPublicElement) {
  const FieldContext f = small_field(4);
  const BigInt c = dlp_ot_element(f.p());
  RandomStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    DlpChooser ch(f, c, rng.bit(), rng);
    ASSERT_EQ(mod(ch.beta(0) * ch.beta(1), f.p()), c);
    ASSERT_NO_THROW(check_dlp_keys(f, c, ch.beta(0), ch.beta(1)));
  }
  EXPECT_THROW(check_dlp_keys(f, c, c, 1 + c), VerificationError);
  EXPECT_THROW(check_dlp_keys(f, c, 0, c), VerificationError);
}

TEST(DlpOt, RecoversChosenSecretBitExact) {
  DlpOtConfig c;
  c.bits = 32;
  c.k = 24;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto r = dlp_1of2_ot(c, s, s + 5000);
    ASSERT_TRUE(r.ok());
    const auto& a = r.party<DlpOtSender>(Role::A);
    const auto& b = r.party<DlpOtReceiver>(Role::B);
    ASSERT_TRUE(b.recovered().has_value());
    ASSERT_EQ(*b.recovered(), b.choice() ? a.secrets().second : a.secrets().first);
    ASSERT_NO_THROW(verify_dlp_ot(r.transcript));
  }
}

TEST(DlpOt, IdenticalSecretsMakeOutputIndependentOfChoice) {
  DlpOtConfig c;
  c.bits = 32;
  c.k = 16;
  const BitString s = BitString::parse("1100101011110000");
  c.secrets = std::pair{s, s};
  for (bool choice : {false, true}) {
    c.choice = choice;
    EXPECT_EQ(dlp_1of2_ot(c, 1, 2).party<DlpOtReceiver>(Role::B).recovered(), s);
  }
}

TEST(DlpOt, OtherSecretStaysMasked) {
  const FieldContext f = small_field(6);
  const BigInt c = dlp_ot_element(f.p());
  RandomStream rng(7);
  int leaked = 0;
  for (int i = 0; i < 1000; ++i) {
    const bool choice = rng.bit();
    DlpChooser ch(f, c, choice, rng);
    const BitString s0 = BitString::random(16, rng), s1 = BitString::random(16, rng);
    const DlpOtReply reply = dlp_ot_respond(f, ch.beta(0), ch.beta(1), s0, s1, rng);
    const int i_c = choice ? 1 : 0;
    ASSERT_EQ(ch.recover(reply.alpha[i_c], reply.masked[i_c]), choice ? s1 : s0);
    if (ch.recover(reply.alpha[1 - i_c], reply.masked[1 - i_c]) == (choice ? s0 : s1)) ++leaked;
  }
  EXPECT_LE(leaked, 2);
}

TEST(DlpOt, StructureCheatIsAlwaysRejected) {
  DlpOtConfig c;
  c.bits = 32;
  c.cheat_structure = true;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto r = dlp_1of2_ot(c, s, s + 1);
    ASSERT_TRUE(r.abort.has_value());
    EXPECT_EQ(r.abort->kind, AbortKind::Verification);
    EXPECT_EQ(r.abort->detected_by, Role::A);
    EXPECT_EQ(r.party<DlpOtReceiver>(Role::B).known_logs().size(), 2u);
  }
}

TEST(DlpOt, OverlongMaskIsRejected) {
  DlpOtConfig c;
  c.bits = 32;
  c.cheat_length = true;
  const auto r = dlp_1of2_ot(c, 1, 2);
  ASSERT_TRUE(r.abort.has_value());
  EXPECT_EQ(r.abort->detected_by, Role::B);
}

TEST(DlpOt, MaskWidth) {
  EXPECT_EQ(dlp_mask(BigInt(0x1234), BigInt(0xffff), 8), BitString::parse("00110100"));
  EXPECT_EQ(dlp_mask(BigInt(5), BigInt(251), 3).size(), 3u);
}

// Graph 1-out-of-2 OT and secret sale ----------------------------------------

TEST(SecretSale, WitnessAlwaysValidForChosenGraph) {
  SecretSaleConfig c;
  c.items = 2;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto r = graph_1of2_ot(c, s, s + 9);
    ASSERT_TRUE(r.ok());
    const auto& b = r.party<SaleReceiver>(Role::B);
    ASSERT_TRUE(b.witness().has_value());
    ASSERT_TRUE(graphs::is_hamiltonian_cycle(b.public_graphs()[b.choice()], *b.witness()));
    const auto& sol = r.party<SaleSender>(Role::A).solutions();
    ASSERT_EQ(sol[b.choice()].graph, b.public_graphs()[b.choice()]);
  }
}

TEST(SecretSale, ThreeItemsChoiceTwo) {
  SecretSaleConfig c;
  c.items = 3;
  c.choice = 2;
  // Sparse enough that another relabeling sharing a Hamiltonian cycle is negligible.
  c.n = 10;
  c.noise_edges = 3;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto r = secret_sale(c, s, s + 1);
    ASSERT_TRUE(r.ok());
    const auto& b = r.party<SaleReceiver>(Role::B);
    ASSERT_EQ(b.choice(), 2u);
    ASSERT_TRUE(graphs::is_hamiltonian_cycle(b.public_graphs()[2], *b.witness()));
    for (std::size_t other : {0u, 1u})
      EXPECT_FALSE(graphs::is_hamiltonian_cycle(b.public_graphs()[other], *b.witness()));
    EXPECT_TRUE(session::check_correctness(r, secret_sale_definition()));
  }
}

TEST(SecretSale, TwoItemsMatchOneOfTwoShape) {
  SecretSaleConfig c;
  c.items = 2;
  const auto x = secret_sale(c, 3, 4);
  const auto y = graph_1of2_ot(c, 3, 4);
  ASSERT_EQ(x.transcript.size(), y.transcript.size());
  for (std::size_t i = 0; i < x.transcript.size(); ++i) {
    EXPECT_EQ(x.transcript[i].direction, y.transcript[i].direction);
    EXPECT_EQ(x.transcript[i].step_label, y.transcript[i].step_label);
    EXPECT_EQ(x.transcript[i].message.payload.size(), y.transcript[i].message.payload.size());
  }
}

TEST(SecretSale, PointedCopyDistributionIndependentOfChoice) {
  RandomStream rng(8);
  SecretSaleConfig c;
  c.items = 2;
  c.n = 4;
  c.noise_edges = 1;
  c.solutions = gen_sale_items(2, 4, 1, rng);
  std::map<std::string, std::size_t> seen[2];
  for (int choice : {0, 1}) {
    c.choice = static_cast<std::size_t>(choice);
    for (std::uint64_t s = 0; s < 6000; ++s) {
      const auto r = secret_sale(c, 77, s * 2 + static_cast<std::uint64_t>(choice));
      ASSERT_TRUE(r.ok());
      ++seen[choice][to_hex(graphs::encode_graph(*r.party<SaleSender>(Role::A).pointed_copy()))];
    }
  }
  EXPECT_GT(seen[0].size(), 1u);
  EXPECT_GT(stats::chi_square_homogeneity(seen[0], seen[1]).p_value, 0.01);
}

TEST(SecretSale, InvalidSolutionIsCaught) {
  SecretSaleConfig c;
  c.cheat_invalid_solution = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto r = graph_1of2_ot(c, s, s);
    ASSERT_TRUE(r.abort.has_value());
    EXPECT_EQ(r.abort->detected_by, Role::B);
  }
}

// OT from two 1-out-of-2 transfers -------------------------------------------

TEST(ComposedOt, DeliveryRateIsOneQuarter) {
  ComposedOtConfig c;
  c.bits = 32;
  const auto p = count(10000, [&](std::size_t i) {
    const auto [sa, sb] = session::trial_seeds(9, i);
    return ot_from_two_1of2(c, sa, sb).party<ComposedOtReceiver>(Role::B).composed().has_value();
  });
  EXPECT_NEAR(p.rate(), 0.25, 0.02);
}

TEST(ComposedOt, ObtainedExactlyWhenBothSharesReal) {
  ComposedOtConfig c;
  c.bits = 32;
  int one_real = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto r = ot_from_two_1of2(c, s, s + 31);
    ASSERT_TRUE(r.ok());
    const auto& a = r.party<ComposedOtSender>(Role::A);
    const auto& b = r.party<ComposedOtReceiver>(Role::B);
    const bool real0 = a.positions()[0] == b.choices()[0], real1 = a.positions()[1] == b.choices()[1];
    ASSERT_EQ(b.composed().has_value(), real0 && real1);
    if (real0 && real1) {
      ASSERT_EQ(apply_perm(b.graphs().g1, graphs::compose(*b.shares()[1], *b.shares()[0])), b.graphs().g2);
    } else if (real0 != real1) {
      ++one_real;
      if (b.shares()[0] && b.shares()[1])
        ASSERT_NE(apply_perm(b.graphs().g1, graphs::compose(*b.shares()[1], *b.shares()[0])), b.graphs().g2);
    }
    ASSERT_TRUE(session::check_correctness(r, ot_from_two_1of2_definition()));
  }
  EXPECT_GT(one_real, 400);
}
