#include "tpc/numtheory.hpp"

#include <algorithm>
#include <string>

#include "tpc/errors.hpp"

namespace tpc::numtheory {

namespace {

constexpr unsigned kSmallPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73,
                                     79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163,
                                     167, 173, 179, 181, 191, 193, 197, 199};

// Strong probable-prime test to base a for odd n > 3 with n - 1 = d * 2^s.
bool strong_probable_prime(const BigInt& n, const BigInt& a, const BigInt& d, unsigned s) {
  BigInt x = pow_mod(a, d, n);
  const BigInt n_minus_1 = n - 1;
  if (x == 1 || x == n_minus_1) return true;
  for (unsigned i = 1; i < s; ++i) {
    x = mod(BigInt(x * x), n);
    if (x == n_minus_1) return true;
    if (x == 1) return false;
  }
  return false;
}

const BigInt& deterministic_bound() {
  static const BigInt bound("330000000000000");
  return bound;
}

}  // namespace

Residue::Residue(const BigInt& value, const BigInt& modulus) : modulus_(modulus) {
  if (modulus < 2) throw InvalidArgument("residue modulus must be at least 2");
  value_ = mod(value, modulus);
}

BigInt pow_mod(const BigInt& base, const BigInt& exp, const BigInt& m) {
  if (m < 2) throw InvalidArgument("pow_mod: modulus must be at least 2");
  if (exp < 0) throw InvalidArgument("pow_mod: negative exponent");
  BigInt out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
  return out;
}

Residue mod_pow(const Residue& base, const BigInt& exp) {
  return Residue(pow_mod(base.value(), exp, base.modulus()), base.modulus());
}

BigInt inverse_mod(const BigInt& a, const BigInt& m) {
  BigInt out;
  if (mpz_invert(out.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw FactorLeak("value is not invertible modulo " + m.get_str());
  return out;
}

int jacobi(const BigInt& a_in, const BigInt& n_in) {
  if (n_in < 3 || mpz_even_p(n_in.get_mpz_t())) throw InvalidArgument("jacobi: n must be odd and at least 3");
  BigInt a = mod(a_in, n_in);
  BigInt n = n_in;
  int result = 1;
  while (a != 0) {
    // Pull out factors of two: (2/n) = -1 iff n = 3 or 5 (mod 8).
    while (mpz_even_p(a.get_mpz_t())) {
      a >>= 1;
      unsigned long r = mpz_fdiv_ui(n.get_mpz_t(), 8);
      if (r == 3 || r == 5) result = -result;
    }
    // Reciprocity: flip sign iff both are 3 (mod 4).
    std::swap(a, n);
    if (mpz_fdiv_ui(a.get_mpz_t(), 4) == 3 && mpz_fdiv_ui(n.get_mpz_t(), 4) == 3) result = -result;
    a = mod(a, n);
  }
  return n == 1 ? result : 0;
}

int legendre(const BigInt& a, const BigInt& p) {
  BigInt r = pow_mod(a, BigInt((p - 1) / 2), p);
  if (r == 0) return 0;
  return r == 1 ? 1 : -1;
}

bool is_probable_prime(const BigInt& n) {
  if (n < 2) return false;
  for (unsigned sp : kSmallPrimes) {
    if (n == sp) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), sp)) return false;
  }
  BigInt d = n - 1;
  unsigned s = 0;
  while (mpz_even_p(d.get_mpz_t())) {
    d >>= 1;
    ++s;
  }
  if (n < deterministic_bound()) {
    for (unsigned a : {2u, 3u, 5u, 7u, 11u, 13u, 17u})
      if (!strong_probable_prime(n, a, d, s)) return false;
    return true;
  }
  RandomStream witnesses(mix_seed(to_u64(n) ^ bit_length(n)));
  for (int round = 0; round < 40; ++round) {
    BigInt a = witnesses.between(2, BigInt(n - 2));
    if (!strong_probable_prime(n, a, d, s)) return false;
  }
  return true;
}

BigInt sqrt_mod_prime(const BigInt& a_in, const BigInt& p) {
  BigInt a = mod(a_in, p);
  if (a == 0) return 0;
  if (legendre(a, p) != 1) throw NotAResidue("value is not a square modulo " + p.get_str());
  if (mpz_fdiv_ui(p.get_mpz_t(), 4) == 3) return pow_mod(a, BigInt((p + 1) / 4), p);

  // Tonelli-Shanks: p - 1 = q * 2^s with q odd.
  BigInt q = p - 1;
  unsigned s = 0;
  while (mpz_even_p(q.get_mpz_t())) {
    q >>= 1;
    ++s;
  }
  BigInt z = 2;
  while (legendre(z, p) != -1) ++z;
  BigInt c = pow_mod(z, q, p);
  BigInt x = pow_mod(a, BigInt((q + 1) / 2), p);
  BigInt t = pow_mod(a, q, p);
  unsigned m = s;
  while (t != 1) {
    unsigned i = 0;
    BigInt t2 = t;
    while (t2 != 1) {
      t2 = mod(BigInt(t2 * t2), p);
      ++i;
    }
    BigInt b = c;
    for (unsigned j = 0; j + i + 1 < m; ++j) b = mod(BigInt(b * b), p);
    x = mod(BigInt(x * b), p);
    c = mod(BigInt(b * b), p);
    t = mod(BigInt(t * c), p);
    m = i;
  }
  return x;
}

BlumModulus::BlumModulus(const BigInt& p, const BigInt& q, bool require_blum) : p_(p), q_(q), n_(p * q) {
  if (p == q) throw InvalidArgument("modulus factors must be distinct");
  if (p < 3 || q < 3) throw InvalidArgument("modulus factors must be odd primes");
  if (!is_probable_prime(p) || !is_probable_prime(q)) throw InvalidArgument("modulus factor is not prime");
  if (require_blum && !is_blum()) throw InvalidArgument("modulus factor is not 3 mod 4");
}

bool BlumModulus::is_blum() const {
  return mpz_fdiv_ui(p_.get_mpz_t(), 4) == 3 && mpz_fdiv_ui(q_.get_mpz_t(), 4) == 3;
}

bool is_generator(const BigInt& g, const BigInt& p, const std::vector<BigInt>& order_factors) {
  if (p < 3 || g < 2 || g >= p) return false;
  BigInt rest = p - 1;
  for (const BigInt& r : order_factors) {
    if (r < 2 || !is_probable_prime(r) || !mpz_divisible_p(rest.get_mpz_t(), r.get_mpz_t())) return false;
    while (mpz_divisible_p(rest.get_mpz_t(), r.get_mpz_t())) rest /= r;
  }
  if (rest != 1) return false;
  for (const BigInt& r : order_factors)
    if (pow_mod(g, BigInt((p - 1) / r), p) == 1) return false;
  return true;
}

std::vector<BigInt> small_prime_factors(const BigInt& n_in) {
  std::vector<BigInt> out;
  BigInt n = n_in;
  for (BigInt d = 2; d * d <= n; ++d) {
    if (mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t())) {
      out.push_back(d);
      while (mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t())) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

FieldContext::FieldContext(const BigInt& p, const BigInt& g, std::vector<BigInt> order_factors)
    : p_(p), g_(g), order_factors_(std::move(order_factors)) {
  if (!is_probable_prime(p)) throw InvalidArgument("field modulus is not prime");
  if (!is_generator(g, p, order_factors_)) throw InvalidArgument("g is not a generator of Z_p*");
}

bool is_qr(const BigInt& y, const BlumModulus& m) {
  if (gcd(y, m.n()) != 1) throw FactorLeak("value shares a factor with the modulus");
  return legendre(y, m.p()) == 1 && legendre(y, m.q()) == 1;
}

std::array<BigInt, 4> four_square_roots(const BigInt& y_in, const BlumModulus& m) {
  const BigInt y = mod(y_in, m.n());
  if (!is_qr(y, m)) throw NotAResidue("value is not a square modulo N");
  const BigInt& p = m.p();
  const BigInt& q = m.q();
  const BigInt& n = m.n();
  BigInt rp = sqrt_mod_prime(y, p);
  BigInt rq = sqrt_mod_prime(y, q);
  // CRT basis: ep = 1 mod p, 0 mod q; eq = 0 mod p, 1 mod q.
  BigInt ep = q * inverse_mod(q, p);
  BigInt eq = p * inverse_mod(p, q);
  BigInt r1 = mod(BigInt(rp * ep + rq * eq), n);
  BigInt r2 = mod(BigInt(rp * ep + (q - rq) * eq), n);
  std::array<BigInt, 4> roots = {r1, BigInt(n - r1), r2, BigInt(n - r2)};
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::pair<BigInt, BigInt> factor_from_roots(const BigInt& x_in, const BigInt& y_in, const BigInt& n) {
  const BigInt x = mod(x_in, n);
  const BigInt y = mod(y_in, n);
  if (mod(BigInt(x * x), n) != mod(BigInt(y * y), n)) throw InvalidArgument("values are not square roots of the same square");
  if (x == y || mod(BigInt(x + y), n) == 0) throw TriviallyRelatedRoots("roots trivially related, no factor");
  BigInt f = gcd(BigInt(x + y), n);
  return {f, BigInt(n / f)};
}

BigInt random_prime(std::size_t bits, bool blum, RandomStream& rng) {
  if (bits < 2) throw InvalidArgument("random_prime: need at least 2 bits");
  if (bits == 2) return 3;
  for (;;) {
    BigInt c = rng.bits(bits);
    mpz_setbit(c.get_mpz_t(), bits - 1);
    mpz_setbit(c.get_mpz_t(), 0);
    if (blum) mpz_setbit(c.get_mpz_t(), 1);
    if (is_probable_prime(c)) return c;
  }
}

namespace {

BlumModulus gen_pair(std::size_t bit_length, bool blum, RandomStream& rng) {
  if (bit_length < 6) throw InvalidArgument("modulus bit length must be at least 6");
  for (;;) {
    std::size_t a = bit_length / 2;
    // Tiny moduli need an unbalanced split to find distinct factors.
    if (bit_length <= 10) a = 2 + rng.below(bit_length - 3);
    BigInt p = random_prime(a, blum, rng);
    BigInt q = random_prime(bit_length - a, blum, rng);
    if (p == q || tpc::bit_length(BigInt(p * q)) != bit_length) continue;
    return BlumModulus(p, q, blum);
  }
}

}  // namespace

BlumModulus gen_blum(std::size_t bit_length, RandomStream& rng) { return gen_pair(bit_length, true, rng); }

BlumModulus gen_modulus(std::size_t bit_length, RandomStream& rng) { return gen_pair(bit_length, false, rng); }

FieldContext gen_field(std::size_t bit_length, RandomStream& rng) {
  if (bit_length < 4) throw InvalidArgument("field bit length must be at least 4");
  for (;;) {
    BigInt q = random_prime(bit_length - 1, false, rng);
    BigInt p = 2 * q + 1;
    if (tpc::bit_length(p) != bit_length || !is_probable_prime(p)) continue;
    std::vector<BigInt> factors = {2};
    if (q != 2) factors.push_back(q);
    for (;;) {
      BigInt g = rng.between(2, BigInt(p - 1));
      if (is_generator(g, p, factors)) return FieldContext(p, g, factors);
    }
  }
}

BigInt sample_nonresidue_jacobi1(const BlumModulus& m, RandomStream& rng) {
  for (;;) {
    BigInt y = rng.between(2, BigInt(m.n() - 1));
    if (gcd(y, m.n()) != 1) continue;
    if (legendre(y, m.p()) == -1 && legendre(y, m.q()) == -1) return y;
  }
}

BigInt random_unit(const BigInt& n, RandomStream& rng) {
  for (;;) {
    BigInt x = rng.between(1, BigInt(n - 1));
    if (gcd(x, n) == 1) return x;
  }
}

}  // namespace tpc::numtheory
