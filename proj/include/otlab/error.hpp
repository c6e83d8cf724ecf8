#pragma once

#include <stdexcept>
#include <string>

namespace otlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wrong matrix/vector dimensions, non-finite entries, or an index out of range.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (p <= 1 where p > 1 is required,
/// eta <= 0, an identically -inf potential, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptySpaceError : public Error {
 public:
  using Error::Error;
};

/// Measures on different spaces with no way to build a cross cost.
class IncompatibleSpacesError : public Error {
 public:
  using Error::Error;
};

class InvalidMeasureError : public Error {
 public:
  using Error::Error;
};

class InvalidCouplingError : public Error {
 public:
  using Error::Error;
};

class FeasibilityError : public Error {
 public:
  using Error::Error;
};

class GlueingError : public Error {
 public:
  using Error::Error;
};

/// The permutation oracle only handles uniform, equal-size supports with n <= 8;
/// the Legendre bridge needs coordinates.
class UnsupportedInstanceError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace otlab
