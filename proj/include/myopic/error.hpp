#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace myopic {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite numbers, out-of-range parameters, malformed arguments.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A vector or profile does not match the action layout it is used with.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration or document content (schema violations, n = 0, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed expression or document text, with a 1-based position.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : ConfigError(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A numerical routine failed to reach its certificate.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double gap)
      : Error(what), gap_(gap) {}
  double gap() const { return gap_; }

 private:
  double gap_;
};

/// An iterative search ran out of budget; carries the best residual seen.
class BudgetExhausted : public NumericError {
 public:
  using NumericError::NumericError;
};

/// No joint-plan equilibrium payoff was found for some prior, so a
/// continuation correspondence cannot be built.
class ContinuationUnavailable : public NumericError {
 public:
  using NumericError::NumericError;
};

/// An expression was evaluated outside its domain (division by zero).
class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace myopic
