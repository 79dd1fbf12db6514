#pragma once

#include <stdexcept>
#include <string>

namespace mpbo {

// Raised when input data fails structural or semantic checks.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised on file syntax errors, with 1-based location.
class ParseError : public DataError {
 public:
  ParseError(const std::string& message, int line, int col)
      : DataError(message + " (line " + std::to_string(line) + ", col " +
                  std::to_string(col) + ")"),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

// Raised when no feasible configuration exists or can be found.
class InfeasibleError : public DataError {
 public:
  using DataError::DataError;
};

// Raised when a numeric routine cannot produce a trustworthy result.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mpbo
