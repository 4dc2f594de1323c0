#pragma once

#include <array>
#include <utility>
#include <vector>

#include "tpc/bigint.hpp"
#include "tpc/random.hpp"

/// Modular arithmetic for the quadratic-residuosity and discrete-log settings.
///
/// Sizes are desk scale (6 to 512 bits); none of this is constant time.
namespace tpc::numtheory {

/// An element of Z_m. Invariant: 0 <= value < modulus, modulus >= 2.
class Residue {
 public:
  /// Reduces `value` mod `modulus`. Throws InvalidArgument when modulus < 2.
  Residue(const BigInt& value, const BigInt& modulus);

  const BigInt& value() const { return value_; }
  const BigInt& modulus() const { return modulus_; }

  friend bool operator==(const Residue&, const Residue&) = default;

 private:
  BigInt value_;
  BigInt modulus_;
};

/// base^exp mod m.
Residue mod_pow(const Residue& base, const BigInt& exp);
BigInt pow_mod(const BigInt& base, const BigInt& exp, const BigInt& m);

/// Multiplicative inverse; throws FactorLeak when gcd(a, m) != 1.
BigInt inverse_mod(const BigInt& a, const BigInt& m);

/// Jacobi symbol (a/n) by quadratic reciprocity. n must be odd and >= 3.
int jacobi(const BigInt& a, const BigInt& n);

/// Legendre symbol (a/p) by Euler's criterion; p an odd prime.
int legendre(const BigInt& a, const BigInt& p);

/// Trial division by small primes, then Miller-Rabin. Inputs below 3.3e14
/// use the deterministic witness set {2..17}; larger inputs use 40 witnesses
/// drawn from a stream seeded by the candidate itself, so the answer is a
/// pure function of n.
bool is_probable_prime(const BigInt& n);

/// A square root of a modulo the odd prime p: exponent (p+1)/4 when
/// p = 3 (mod 4), Tonelli-Shanks otherwise. Throws NotAResidue.
BigInt sqrt_mod_prime(const BigInt& a, const BigInt& p);

/// N = p*q with known factorization.
class BlumModulus {
 public:
  /// Validates p != q, both prime and odd, and (when `require_blum`)
  /// p = q = 3 (mod 4). Throws InvalidArgument naming the failed rule.
  BlumModulus(const BigInt& p, const BigInt& q, bool require_blum = true);

  const BigInt& p() const { return p_; }
  const BigInt& q() const { return q_; }
  const BigInt& n() const { return n_; }
  /// True when both factors are 3 mod 4 (independent of how it was built).
  bool is_blum() const;

 private:
  BigInt p_;
  BigInt q_;
  BigInt n_;
};

/// Prime field Z_p with a verified generator g of Z_p*. The prime factors of
/// p-1 travel with the context so any party can re-check the generator.
class FieldContext {
 public:
  /// Throws InvalidArgument if p is not prime, the factor list does not
  /// factor p-1 completely, or g fails the generator test.
  FieldContext(const BigInt& p, const BigInt& g, std::vector<BigInt> order_factors);

  const BigInt& p() const { return p_; }
  const BigInt& g() const { return g_; }
  const std::vector<BigInt>& order_factors() const { return order_factors_; }

 private:
  BigInt p_;
  BigInt g_;
  std::vector<BigInt> order_factors_;
};

/// g^((p-1)/r) != 1 for every prime r in `order_factors`, and those primes
/// completely factor p-1. g = 0, 1 and values >= p are rejected.
bool is_generator(const BigInt& g, const BigInt& p, const std::vector<BigInt>& order_factors);

/// Distinct prime factors of n by trial division. Only for small n (tests, tiny fields).
std::vector<BigInt> small_prime_factors(const BigInt& n);

/// True iff y is a square mod N. Throws FactorLeak if gcd(y, N) != 1.
bool is_qr(const BigInt& y, const BlumModulus& m);

/// The four square roots of y mod N in ascending order.
/// Throws FactorLeak if gcd(y, N) != 1 and NotAResidue if y is not a square.
std::array<BigInt, 4> four_square_roots(const BigInt& y, const BlumModulus& m);

/// From x^2 = y^2 (mod N) with x != +-y, returns (gcd(x+y, N), N / gcd(x+y, N)).
/// Throws TriviallyRelatedRoots when x = +-y and InvalidArgument when the
/// squares differ.
std::pair<BigInt, BigInt> factor_from_roots(const BigInt& x, const BigInt& y, const BigInt& n);

/// Random prime of exactly `bits` bits; with `blum`, restricted to 3 mod 4.
BigInt random_prime(std::size_t bits, bool blum, RandomStream& rng);

/// N = p*q of exactly `bit_length` bits (>= 6), both primes 3 mod 4.
BlumModulus gen_blum(std::size_t bit_length, RandomStream& rng);
/// As gen_blum without the congruence condition (Rabin OT setting).
BlumModulus gen_modulus(std::size_t bit_length, RandomStream& rng);

/// Safe prime p = 2q'+1 of exactly `bit_length` bits (>= 4) with a verified generator.
FieldContext gen_field(std::size_t bit_length, RandomStream& rng);

/// y with Jacobi symbol (y/N) = 1 that is not a square mod N.
BigInt sample_nonresidue_jacobi1(const BlumModulus& m, RandomStream& rng);

/// Uniform element of Z_N* (gcd(x, N) = 1, 0 < x < N).
BigInt random_unit(const BigInt& n, RandomStream& rng);

}  // namespace tpc::numtheory
