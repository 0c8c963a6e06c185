#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace learnbd {

/// Malformed arguments: dimension mismatches, out-of-range parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A text input could not be parsed. Carries the 1-based line of the failure.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A solver contract was violated (unbounded relaxation, lost complete recourse, ...).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace learnbd
