#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccdim {

/// Bad user input: malformed config, invalid flag values, out-of-range arguments.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expression syntax error; carries the 0-based character position of the fault.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InputError(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Evaluation left the domain of sqrt/log/div; carries the offending subexpression.
class EvalDomainError : public std::runtime_error {
 public:
  EvalDomainError(const std::string& what, std::string subexpression)
      : std::runtime_error(what + " in '" + subexpression + "'"),
        subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

/// Root finding or bracketing failed in a way that signals inconsistent defining data.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ccdim
