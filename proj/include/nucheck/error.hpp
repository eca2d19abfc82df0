#pragma once

#include <stdexcept>
#include <string>

namespace nucheck {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (|z| >= 1, r outside [0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A weight or table cannot be evaluated at the radius an algorithm needs.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class InvalidWeightError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value met while integrating or optimizing.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, std::string field = {})
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

/// Raised when an oracle refuses to run because its precondition verdict failed.
class RefusalError : public Error {
 public:
  using Error::Error;
};

}  // namespace nucheck
