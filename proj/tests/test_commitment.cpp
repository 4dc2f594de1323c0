#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "tpc/commitment.hpp"
#include "tpc/errors.hpp"

using namespace tpc;
using namespace tpc::commitment;
using session::Role;

namespace {

const BlumModulus kN21(3, 7);

Bytes qrp_randomness(const BigInt& r, const BigInt& p, const BigInt& q) {
  ByteWriter w;
  write_int(w, r);
  write_int(w, p);
  write_int(w, q);
  return std::move(w).take();
}

Bytes perm_bytes(const Permutation& pi) {
  ByteWriter w;
  graphs::write_perm(w, pi);
  return std::move(w).take();
}

bool is_prime_l(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<long> units21() {
  std::vector<long> u;
  for (long r = 1; r < 21; ++r)
    if (r % 3 && r % 7) u.push_back(r);
  return u;
}

/// Flips one bit of the witness and expects rejection.
void expect_tamper_rejected(const Commitment& c, const Opening& o, RandomStream& rng) {
  Commitment t = c;
  const std::size_t bit = rng.below(t.witness.size() * 8);
  t.witness[bit / 8] ^= static_cast<std::uint8_t>(0x80 >> (bit % 8));
  ASSERT_FALSE(verify(t, o)) << "bit " << bit;
}

}  // namespace

// QRP -----------------------------------------------------------------------

TEST(QrpCommitment, HandValue) {
  EXPECT_EQ(qrp_witness(true, 2, 5, 21), 20);
  EXPECT_EQ(qrp_witness(false, 2, 5, 21), 4);
  QrpCommitter c(kN21, 5);
  const Commitment com = c.commit_with(true, 2);
  EXPECT_EQ(com, qrp_commitment(21, 5, 20));
  EXPECT_TRUE(verify(com, c.open()));
  EXPECT_THROW(c.commit_with(false, 4), Error);
}

TEST(QrpCommitment, RejectsBadY) {
  EXPECT_THROW(QrpCommitter(kN21, 4), InvalidArgument);   // a square
  EXPECT_THROW(QrpCommitter(kN21, 2), InvalidArgument);   // Jacobi -1
  EXPECT_THROW(QrpCommitter(kN21, 21), InvalidArgument);  // not reduced
}

TEST(QrpCommitment, ResiduosityEncodesTheBit) {
  for (long r : units21()) {
    EXPECT_TRUE(numtheory::is_qr(qrp_witness(false, r, 5, 21), kN21));
    EXPECT_FALSE(numtheory::is_qr(qrp_witness(true, r, 5, 21), kN21));
  }
}

TEST(QrpCommitment, HidingStructureAtN21) {
  std::map<long, int> seen[2];
  for (int b : {0, 1})
    for (long r : units21()) ++seen[b][qrp_witness(b == 1, r, 5, 21).get_si()];
  EXPECT_EQ(seen[0].size(), seen[1].size());
  for (int b : {0, 1})
    for (const auto& [c, n] : seen[b]) {
      EXPECT_EQ(numtheory::jacobi(c, 21), 1);
      EXPECT_EQ(n, 4);
    }
}

TEST(QrpCommitment, BindingExhaustiveAtN21) {
  const auto units = units21();
  for (int b : {0, 1})
    for (long r : units) {
      const BigInt c = qrp_witness(b == 1, r, 5, 21);
      const Commitment com = qrp_commitment(21, 5, c);
      for (long r2 : units) {
        ASSERT_NE(qrp_witness(b == 0, r2, 5, 21), c);
        ASSERT_FALSE(verify(com, Opening{b == 0 ? 1 : 0, qrp_randomness(r2, 3, 7)}));
      }
      int openings = 0;
      for (long r2 : units) openings += static_cast<bool>(verify(com, Opening{b, qrp_randomness(r2, 3, 7)}));
      ASSERT_EQ(openings, 4);  // the four roots of r^2
    }
}

TEST(QrpCommitment, VerifyRejectsBadOpenings) {
  const Commitment com = qrp_commitment(21, 5, 20);
  EXPECT_TRUE(verify(com, Opening{1, qrp_randomness(2, 3, 7)}));
  EXPECT_FALSE(verify(com, Opening{2, qrp_randomness(2, 3, 7)}));
  EXPECT_FALSE(verify(com, Opening{1, qrp_randomness(2, 1, 21)}));
  EXPECT_FALSE(verify(com, Opening{1, qrp_randomness(23, 3, 7)}));
  EXPECT_FALSE(verify(com, Opening{1, qrp_randomness(7, 3, 7)}));
  EXPECT_FALSE(verify(qrp_commitment(21, 4, 16), Opening{1, qrp_randomness(2, 3, 7)}));  // y a square
  EXPECT_FALSE(verify(com, Opening{1, {}}));
  EXPECT_TRUE(verify_qrp_without_factors(com, true, 2));
  EXPECT_FALSE(verify_qrp_without_factors(com, false, 2));
}

TEST(QrpCommitment, CompletenessAndTamper) {
  RandomStream rng(1);
  for (int i = 0; i < 1000; ++i) {
    QrpCommitter c = QrpCommitter::generate(32, rng);
    const bool b = rng.bit();
    const Commitment com = c.commit(b, rng);
    const Opening o = c.open();
    ASSERT_TRUE(verify(com, o)) << verify(com, o).diagnostic;
    ASSERT_EQ(o.value, b ? 1 : 0);
    expect_tamper_rejected(com, o, rng);
    Opening flipped = o;
    flipped.value = b ? 0 : 1;
    ASSERT_FALSE(verify(com, flipped));
  }
}

// DLP -----------------------------------------------------------------------

TEST(DlpCommitment, HandValue) {
  const FieldContext f(7, 3, {2, 3});
  const Commitment com = dlp_commit(4, f);
  ByteReader r(com.witness);
  EXPECT_EQ(read_int(r), 4);
  EXPECT_TRUE(verify(com, dlp_open(4)));
  EXPECT_FALSE(verify(com, dlp_open(4 + 6)));
  EXPECT_FALSE(verify(com, dlp_open(3)));
  EXPECT_THROW(dlp_commit(1, f), InvalidArgument);
  EXPECT_THROW(dlp_commit(6, f), InvalidArgument);
}

TEST(DlpCommitment, BindingExhaustiveUpTo1000) {
  for (long p = 5; p <= 1000; ++p) {
    if (!is_prime_l(p)) continue;
    const auto factors = numtheory::small_prime_factors(p - 1);
    long g = 2;
    while (!numtheory::is_generator(g, p, factors)) ++g;
    std::map<long, long> first_exponent;
    long v = g * g % p;
    for (long x = 2; x < p - 1; ++x) {
      ASSERT_TRUE(first_exponent.emplace(v, x).second) << "g^" << x << " repeats mod " << p;
      v = v * g % p;
    }
  }
}

TEST(DlpCommitment, OnlyTheCommittedExponentOpens) {
  for (long p : {7, 23, 101, 227}) {
    const auto factors = numtheory::small_prime_factors(p - 1);
    long g = 2;
    while (!numtheory::is_generator(g, p, factors)) ++g;
    const FieldContext f(p, g, factors);
    for (long x = 2; x < p - 1; ++x) {
      const Commitment com = dlp_commit(x, f);
      for (long x2 = 2; x2 < p - 1; ++x2) ASSERT_EQ(static_cast<bool>(verify(com, dlp_open(x2))), x2 == x);
      ASSERT_FALSE(verify(com, dlp_open(x + p - 1)));
    }
  }
}

TEST(DlpCommitment, CompletenessAndTamper) {
  RandomStream rng(2);
  const FieldContext f = numtheory::gen_field(32, rng);
  for (int i = 0; i < 1000; ++i) {
    const BigInt x = rng.between(2, f.p() - 2);
    const Commitment com = dlp_commit(x, f);
    ASSERT_TRUE(verify(com, dlp_open(x)));
    expect_tamper_rejected(com, dlp_open(x), rng);
  }
}

// Graph ---------------------------------------------------------------------

TEST(GraphCommitment, IdentityWitnessIsG) {
  RandomStream rng(3);
  const auto [g, h] = graphs::gen_noniso_pair(6, rng);
  const auto gc = graph_commit_with(false, g, h, Permutation::identity(6));
  ByteReader r(gc.commitment.witness);
  EXPECT_EQ(graphs::read_graph(r), g);
  EXPECT_TRUE(verify(gc.commitment, gc.opening));
  EXPECT_THROW(graph_commit(false, g, g, rng), InvalidArgument);
}

TEST(GraphCommitment, BindingExhaustiveUpToTen) {
  RandomStream rng(4);
  for (std::size_t n = 3; n <= 10; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto [g, h] = graphs::gen_noniso_pair(n, rng);
      for (int b : {0, 1}) {
        const auto gc = graph_commit(b == 1, g, h, rng);
        ByteReader r(gc.commitment.witness);
        const Graph w = graphs::read_graph(r);
        ASSERT_FALSE(graphs::find_isomorphism(b == 1 ? g : h, w).has_value());
        ASSERT_TRUE(graphs::find_isomorphism(b == 1 ? h : g, w).has_value());
        if (n <= 6) {
          std::vector<graphs::Vertex> p(n);
          std::iota(p.begin(), p.end(), 0);
          do {
            ASSERT_FALSE(verify(gc.commitment, Opening{b == 1 ? 0 : 1, perm_bytes(Permutation(p))}));
          } while (std::next_permutation(p.begin(), p.end()));
        }
      }
    }
  }
}

TEST(GraphCommitment, CompletenessAndTamper) {
  RandomStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 4 + rng.below(7);
    const auto [g, h] = graphs::gen_noniso_pair(n, rng);
    const auto gc = graph_commit(rng.bit(), g, h, rng);
    ASSERT_TRUE(verify(gc.commitment, gc.opening));
    expect_tamper_rejected(gc.commitment, gc.opening, rng);
  }
}

// Sessions ------------------------------------------------------------------

TEST(BitCommitmentSession, HonestRunsOpen) {
  for (auto scheme : {Scheme::Qrp, Scheme::Dlp, Scheme::Graph}) {
    for (bool qnr : {false, true}) {
      if (qnr && scheme != Scheme::Qrp) continue;
      BcConfig c;
      c.scheme = scheme;
      c.qnr_proof = qnr;
      c.bits = 32;
      for (std::uint64_t s = 0; s < 50; ++s) {
        const auto r = bit_commitment(c, s, s + 1);
        ASSERT_TRUE(r.ok()) << r.abort->reason;
        const auto& opened = r.party<BcReceiver>(Role::B).opened();
        ASSERT_TRUE(opened.has_value());
        ASSERT_EQ(*opened, r.party<BcCommitter>(Role::A).value());
        ASSERT_TRUE(session::check_correctness(r, bit_commitment_definition()));
        ASSERT_NO_THROW(verify_bit_commitment(r.transcript, bc_protocol(c)));
      }
    }
  }
}

TEST(BitCommitmentSession, FlippedOpeningsAreCaught) {
  for (auto scheme : {Scheme::Qrp, Scheme::Dlp, Scheme::Graph}) {
    BcConfig c;
    c.scheme = scheme;
    c.bits = 32;
    c.cheat_flip_opening = true;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto r = bit_commitment(c, s, s);
      ASSERT_TRUE(r.abort.has_value());
      EXPECT_EQ(r.abort->detected_by, Role::B);
      EXPECT_FALSE(r.party<BcReceiver>(Role::B).opened().has_value());
    }
  }
}

TEST(BitCommitmentSession, ResidueYIsCaughtByNonResiduosityProof) {
  BcConfig c;
  c.qnr_proof = true;
  c.bits = 32;
  c.cheat_residue_y = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto r = bit_commitment(c, s, s + 3);
    ASSERT_TRUE(r.abort.has_value());
    EXPECT_EQ(r.abort->detected_by, Role::B);
  }
}
