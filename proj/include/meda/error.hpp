#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace meda {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UndeclaredSymbol : public Error {
 public:
  explicit UndeclaredSymbol(const std::string& name)
      : Error("undeclared identifier '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class DivisionByZero : public Error {
 public:
  explicit DivisionByZero(const std::string& what = "division by zero") : Error(what) {}
};

class NonPolynomial : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

class UnboundSymbol : public Error {
 public:
  explicit UnboundSymbol(const std::string& name)
      : Error("no numeric value bound for '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Raised when a trigonometric/hyperbolic denominator or a negative-power base
/// falls below the pole guard during numeric evaluation.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Problem DSL and candidate-file errors carry the 1-based line number.
class FileFormatError : public Error {
 public:
  FileFormatError(const std::string& origin, int line, const std::string& message)
      : Error(origin + ":" + std::to_string(line) + ": " + message), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Failure of a structural step in the reduction chain (reduce, integrate,
/// eliminate, balance, power transform, ansatz construction).
class DerivationError : public Error {
 public:
  using Error::Error;
};

class CandidateError : public Error {
 public:
  using Error::Error;
};

/// Symbolic and finite-difference derivatives disagree: a differentiation bug,
/// not a failing solution.
class CrossCheckError : public Error {
 public:
  using Error::Error;
};

}  // namespace meda
