#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flocksim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value violates its invariant. The message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Least-squares system is singular or too ill-conditioned to solve.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed log or config input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace flocksim
