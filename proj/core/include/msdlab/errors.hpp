#pragma once

#include <stdexcept>
#include <string>

namespace msd {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad input: parameter domains, config schema, grid mismatches, precondition
/// violations. CLI maps this to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure at run time: divergence, iteration limits, stability,
/// no-stationary-state conditions, saturated books. CLI maps this to exit 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Requested extra volume exceeds what the book can absorb. Carries the
/// largest volume that still crosses inside the grid.
class SaturationError : public NumericError {
 public:
  SaturationError(const std::string& what, double max_fillable)
      : NumericError(what), max_fillable_(max_fillable) {}
  double max_fillable() const { return max_fillable_; }

 private:
  double max_fillable_;
};

/// File system and serialization failures. CLI maps this to exit 4.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data; remembers the 1-based line it came from.
class ParseError : public IoError {
 public:
  ParseError(const std::string& what, long line)
      : IoError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace msd
