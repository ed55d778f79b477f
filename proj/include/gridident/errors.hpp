#pragma once

#include <stdexcept>
#include <string>

namespace gridident {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidSizeError : public Error {
  public:
    using Error::Error;
};

class NotFoundError : public Error {
  public:
    using Error::Error;
};

/// A matrix or vector violates a structural invariant (symmetry, zero row sums).
class ConsistencyError : public Error {
  public:
    using Error::Error;
};

/// A closed-form count or rank formula was requested outside the range where it holds.
class OutOfRegimeError : public Error {
  public:
    using Error::Error;
};

/// Malformed bus/phase description.
class SpecError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    using Error::Error;
};

class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Measurement sets or node sets that should line up do not.
class AlignmentError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

class SolverFailureError : public Error {
  public:
    using Error::Error;
};

/// Fewer operating points than the identifiability threshold for the prior.
class InsufficientMeasurementsError : public Error {
  public:
    InsufficientMeasurementsError(const std::string& what, int required, int supplied)
        : Error(what), required_(required), supplied_(supplied) {}
    int required() const noexcept { return required_; }
    int supplied() const noexcept { return supplied_; }

  private:
    int required_;
    int supplied_;
};

}  // namespace gridident
