#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linmba {

/// Malformed expression text. `position` is the 0-based byte offset.
class SyntaxError : public std::runtime_error {
public:
  SyntaxError(std::size_t position, const std::string& message)
      : std::runtime_error("syntax error at " + std::to_string(position) + ": " + message),
        position_(position), detail_(message) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  std::size_t position_;
  std::string detail_;
};

class MissingVariable : public std::runtime_error {
public:
  explicit MissingVariable(const std::string& name)
      : std::runtime_error("no value assigned to variable '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

class CapExceeded : public std::runtime_error {
public:
  CapExceeded(unsigned count, unsigned cap)
      : std::runtime_error(std::to_string(count) + " variables exceed the configured cap of " +
                           std::to_string(cap)) {}
};

class LengthMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InvalidSpec : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class EvenMultiplier : public InvalidSpec {
public:
  EvenMultiplier() : InvalidSpec("affine multiplier must be odd to be invertible") {}
};

class BudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace linmba
