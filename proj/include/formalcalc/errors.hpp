#pragma once

#include <stdexcept>
#include <string>

namespace formalcalc {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different domains, bases, formal degrees or value spaces.
class MismatchError : public Error {
 public:
  using Error::Error;
};

/// A truncated series does not carry enough exact coefficients.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A support or subset condition is violated.
class SupportError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature failed to reach the tolerance within its budget.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Generic violated precondition (bad arguments, unsupported backend feature).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed textual or JSON input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace formalcalc
