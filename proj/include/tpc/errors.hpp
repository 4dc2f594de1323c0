#pragma once

#include <stdexcept>
#include <string>

namespace tpc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad modulus, out-of-range value, size mismatch).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An operation needed a unit of Z_N* but received a value sharing a factor with N.
class FactorLeak : public Error {
 public:
  using Error::Error;
};

/// Square roots were requested for a quadratic non-residue.
class NotAResidue : public Error {
 public:
  using Error::Error;
};

/// Two square roots were congruent up to sign, so no factor can be derived.
class TriviallyRelatedRoots : public Error {
 public:
  using Error::Error;
};

/// Brute-force graph oracle called on an instance above its size bound.
class OracleBoundExceeded : public Error {
 public:
  using Error::Error;
};

/// Byte-level framing problem: truncation, oversize length, unknown tag, trailing bytes.
class FramingError : public Error {
 public:
  using Error::Error;
};

/// A protocol-level check performed by a party failed.
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace tpc
