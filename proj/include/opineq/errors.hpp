#pragma once

#include <stdexcept>
#include <string>

namespace opineq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input matrix is not Hermitian within tolerance.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Operand dimensions or multi-index shapes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar function was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An operator required to be positive (semi)definite is not.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed descriptor, file or argument.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace opineq
