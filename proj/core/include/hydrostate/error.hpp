#pragma once

#include <stdexcept>
#include <string>

namespace hydrostate {

// Malformed or inconsistent input data (files, configuration, ids).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A syntax problem at a known line of a text input.
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, int line)
      : InputError("line " + std::to_string(line) + ": " + message), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Iterative method failed, matrix singular, or state became non-finite.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& message, double residual = 0.0)
      : std::runtime_error(message), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace hydrostate
