#pragma once

#include <stdexcept>
#include <string>

namespace gts {

// All library failures derive from gts::Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Discretization cannot represent the request (grid too coarse, narrow or wide).
class GridError : public Error {
 public:
  using Error::Error;
};

// Point requested outside the span of a tabulated function.
class SpanError : public Error {
 public:
  using Error::Error;
};

// Malformed or empty input data.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Numerical evaluation produced a non-finite or inconsistent value.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace gts
