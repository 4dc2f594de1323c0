#include "tpc/commitment.hpp"

#include "tpc/errors.hpp"

namespace tpc::commitment {

using numtheory::jacobi;
using numtheory::pow_mod;

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Qrp:
      return "qrp";
    case Scheme::Dlp:
      return "dlp";
    case Scheme::Graph:
      return "graph";
  }
  return "?";
}

namespace {

CheckResult pass() { return {true, "opening verifies"}; }
CheckResult fail(std::string why) { return {false, std::move(why)}; }

bool distinct_primes(const BigInt& p, const BigInt& q) {
  return p != q && p > 2 && q > 2 && numtheory::is_probable_prime(p) && numtheory::is_probable_prime(q);
}

CheckResult verify_qrp(const Commitment& c, const Opening& o) {
  BigInt n, y, w, r, p, q;
  try {
    ByteReader pr(c.public_params);
    n = read_int(pr);
    y = read_int(pr);
    pr.expect_done("qrp parameters");
  } catch (const Error&) {
    return fail("malformed parameters");
  }
  try {
    ByteReader wr(c.witness);
    w = read_int(wr);
    wr.expect_done("qrp witness");
  } catch (const Error&) {
    return fail("malformed witness");
  }
  try {
    ByteReader rr(o.randomness);
    r = read_int(rr);
    p = read_int(rr);
    q = read_int(rr);
    rr.expect_done("qrp opening");
  } catch (const Error&) {
    return fail("malformed opening");
  }
  if (o.value != 0 && o.value != 1) return fail("committed value is not a bit");
  if (n < 15 || w >= n || y >= n || r >= n) return fail("values not reduced mod N");
  if (p * q != n) return fail("p * q != N");
  if (!distinct_primes(p, q)) return fail("p and q are not distinct odd primes");
  if (jacobi(y, n) != 1) return fail("jacobi(y, N) != 1");
  if (numtheory::legendre(y, p) == 1 && numtheory::legendre(y, q) == 1) return fail("y is a quadratic residue");
  if (r == 0 || gcd(r, n) != 1) return fail("r is not a unit mod N");
  if (qrp_witness(o.value == 1, r, y, n) != w) return fail("c != r^2 y^b mod N");
  return pass();
}

CheckResult verify_dlp(const Commitment& c, const Opening& o) {
  std::optional<FieldContext> field;
  BigInt y;
  try {
    ByteReader pr(c.public_params);
    field = protocol::read_field(pr);
    pr.expect_done("dlp parameters");
  } catch (const VerificationError&) {
    return fail("g fails the generator check");
  } catch (const Error&) {
    return fail("malformed parameters");
  }
  try {
    ByteReader wr(c.witness);
    y = read_int(wr);
    wr.expect_done("dlp witness");
  } catch (const Error&) {
    return fail("malformed witness");
  }
  if (!o.randomness.empty()) return fail("malformed opening");
  const BigInt& p = field->p();
  if (!(o.value > 1 && o.value < p - 1)) return fail("x outside (1, p-1)");
  if (pow_mod(field->g(), o.value, p) != y) return fail("y != g^x mod p");
  return pass();
}

CheckResult verify_graph(const Commitment& c, const Opening& o) {
  std::optional<Graph> g, h, w;
  std::optional<Permutation> pi;
  try {
    ByteReader pr(c.public_params);
    g = graphs::read_graph(pr);
    h = graphs::read_graph(pr);
    pr.expect_done("graph parameters");
  } catch (const Error&) {
    return fail("malformed parameters");
  }
  try {
    ByteReader wr(c.witness);
    w = graphs::read_graph(wr);
    wr.expect_done("graph witness");
  } catch (const Error&) {
    return fail("malformed witness");
  }
  try {
    ByteReader rr(o.randomness);
    pi = graphs::read_perm(rr);
    rr.expect_done("graph opening");
  } catch (const Error&) {
    return fail("malformed opening");
  }
  if (o.value != 0 && o.value != 1) return fail("committed value is not a bit");
  if (g->size() != h->size() || g->degree_sequence() == h->degree_sequence())
    return fail("graph pair lacks a degree-sequence non-isomorphism certificate");
  if (pi->size() != g->size() || w->size() != g->size()) return fail("permutation or copy has the wrong size");
  if (graphs::apply_perm(o.value == 0 ? *g : *h, *pi) != *w) return fail("permutation does not map the claimed graph to the copy");
  return pass();
}

}  // namespace

CheckResult verify(const Commitment& c, const Opening& o) {
  switch (c.scheme) {
    case Scheme::Qrp:
      return verify_qrp(c, o);
    case Scheme::Dlp:
      return verify_dlp(c, o);
    case Scheme::Graph:
      return verify_graph(c, o);
  }
  return fail("unknown scheme");
}

Commitment qrp_commitment(const BigInt& n, const BigInt& y, const BigInt& c) {
  Commitment out{Scheme::Qrp, {}, {}};
  ByteWriter p;
  write_int(p, n);
  write_int(p, y);
  out.public_params = std::move(p).take();
  ByteWriter w;
  write_int(w, c);
  out.witness = std::move(w).take();
  return out;
}

BigInt qrp_witness(bool b, const BigInt& r, const BigInt& y, const BigInt& n) {
  BigInt c = mod(r * r, n);
  if (b) c = mod(c * y, n);
  return c;
}

QrpCommitter::QrpCommitter(BlumModulus modulus, BigInt y) : modulus_(std::move(modulus)), y_(std::move(y)) {
  const BigInt& n = modulus_.n();
  if (y_ <= 0 || y_ >= n) throw InvalidArgument("y must lie in (0, N)");
  if (jacobi(y_, n) != 1) throw InvalidArgument("y must have Jacobi symbol 1");
  if (numtheory::is_qr(y_, modulus_)) throw InvalidArgument("y must be a quadratic non-residue");
}

QrpCommitter QrpCommitter::generate(std::size_t bits, RandomStream& rng) {
  BlumModulus m = numtheory::gen_blum(bits, rng);
  BigInt y = numtheory::sample_nonresidue_jacobi1(m, rng);
  return QrpCommitter(std::move(m), std::move(y));
}

QrpCommitter QrpCommitter::unchecked(BlumModulus modulus, BigInt y) {
  return QrpCommitter(std::move(modulus), std::move(y), Unchecked{});
}

Commitment QrpCommitter::commit(bool b, RandomStream& rng) {
  if (committed_) throw Error("this modulus has already been used for a commitment");
  return commit_with(b, numtheory::random_unit(modulus_.n(), rng));
}

Commitment QrpCommitter::commit_with(bool b, const BigInt& r) {
  if (committed_) throw Error("this modulus has already been used for a commitment");
  if (r <= 0 || r >= modulus_.n() || gcd(r, modulus_.n()) != 1) throw InvalidArgument("r must be a unit mod N");
  committed_ = {b, r};
  return qrp_commitment(modulus_.n(), y_, qrp_witness(b, r, y_, modulus_.n()));
}

Opening QrpCommitter::open() const {
  if (!committed_) throw Error("nothing committed");
  ByteWriter w;
  write_int(w, committed_->second);
  write_int(w, modulus_.p());
  write_int(w, modulus_.q());
  return Opening{committed_->first ? 1 : 0, std::move(w).take()};
}

std::pair<bool, BigInt> QrpCommitter::open_without_factors() const {
  if (!committed_) throw Error("nothing committed");
  return *committed_;
}

CheckResult verify_qrp_without_factors(const Commitment& c, bool b, const BigInt& r) {
  BigInt n, y, w;
  try {
    ByteReader pr(c.public_params);
    n = read_int(pr);
    y = read_int(pr);
    pr.expect_done("qrp parameters");
    ByteReader wr(c.witness);
    w = read_int(wr);
    wr.expect_done("qrp witness");
  } catch (const Error&) {
    return fail("malformed commitment");
  }
  if (n < 15 || !mpz_odd_p(n.get_mpz_t()) || w >= n || y >= n || r >= n) return fail("values not reduced mod N");
  if (jacobi(y, n) != 1) return fail("jacobi(y, N) != 1");
  if (r == 0 || gcd(r, n) != 1) return fail("r is not a unit mod N");
  if (qrp_witness(b, r, y, n) != w) return fail("c != r^2 y^b mod N");
  return pass();
}

Commitment dlp_commit(const BigInt& x, const FieldContext& field) {
  if (!(x > 1 && x < field.p() - 1)) throw InvalidArgument("x must satisfy 1 < x < p-1");
  Commitment out{Scheme::Dlp, {}, {}};
  ByteWriter p;
  protocol::write_field(p, field);
  out.public_params = std::move(p).take();
  ByteWriter w;
  write_int(w, pow_mod(field.g(), x, field.p()));
  out.witness = std::move(w).take();
  return out;
}

Opening dlp_open(const BigInt& x) { return Opening{x, {}}; }

GraphCommitted graph_commit(bool b, const Graph& g, const Graph& h, RandomStream& rng) {
  return graph_commit_with(b, g, h, graphs::random_perm(g.size(), rng));
}

GraphCommitted graph_commit_with(bool b, const Graph& g, const Graph& h, const Permutation& pi) {
  if (g.size() != h.size() || g.degree_sequence() == h.degree_sequence())
    throw InvalidArgument("graph pair must have equal size and different degree sequences");
  if (pi.size() != g.size()) throw InvalidArgument("permutation has the wrong size");
  GraphCommitted out;
  out.commitment.scheme = Scheme::Graph;
  ByteWriter p;
  graphs::write_graph(p, g);
  graphs::write_graph(p, h);
  out.commitment.public_params = std::move(p).take();
  ByteWriter w;
  graphs::write_graph(w, graphs::apply_perm(b ? h : g, pi));
  out.commitment.witness = std::move(w).take();
  ByteWriter r;
  graphs::write_perm(r, pi);
  out.opening = Opening{b ? 1 : 0, std::move(r).take()};
  return out;
}

Bytes encode_value(Scheme s, const BigInt& v) {
  ByteWriter w;
  if (s == Scheme::Dlp)
    write_int(w, v);
  else
    w.u8(v == 1 ? 1 : 0);
  return std::move(w).take();
}

}  // namespace tpc::commitment
