#pragma once

#include <stdexcept>
#include <string>

namespace ppt {

// Raised when an argument violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a numerical procedure cannot proceed (e.g. step-size underflow).
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed catalog or CSV input; carries the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A well-formed catalog entry whose train no longer meets its own problem.
class RevalidationError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace ppt
