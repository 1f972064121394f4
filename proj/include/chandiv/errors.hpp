#pragma once

#include <stdexcept>
#include <string>

namespace chandiv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or dimensions that do not agree with each other.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input that is structurally invalid (non-Hermitian Choi, bad parameters, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A map that was required to be completely positive is not.
/// Carries the offending Choi eigenvalue.
class NotCompletelyPositive : public Error {
 public:
  NotCompletelyPositive(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// The family e^{-tL} E does not move: E is a fixed point of the chosen generator.
class DegenerateFamily : public Error {
 public:
  using Error::Error;
};

/// The family stays completely positive over the whole scan horizon.
class NoCrossing : public Error {
 public:
  using Error::Error;
};

/// Operation is meaningless for unitary channels.
class UnitaryInput : public Error {
 public:
  using Error::Error;
};

/// Lorentz normal form could not be extracted consistently.
class NormalFormError : public Error {
 public:
  using Error::Error;
};

/// Kraus-rank-2 factorization requested for a channel outside C^CP.
class NotInfinitesimallyDivisible : public Error {
 public:
  using Error::Error;
};

/// A single-qubit ancilla cannot realize a channel of Kraus rank above two.
class RankTooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace chandiv
