#pragma once

#include <stdexcept>
#include <string>

namespace qrep {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unknown register label or two operands sharing a label.
class RegisterError : public Error {
 public:
  using Error::Error;
};

// Operand shapes that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value violates a documented invariant (non-Hermitian state, negative
// Bell coefficient, non-unitary correction, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Parameters outside the domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Requested decomposition does not exist.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Brute-force path asked to handle a state that is too large.
class SizeError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace qrep
