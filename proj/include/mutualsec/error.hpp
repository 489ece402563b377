#pragma once

#include <stdexcept>
#include <string>

namespace mutualsec {

// Invalid input: malformed matrices, out-of-range parameters, bad subsets.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// No incentive-compatible design exists for the requested strategy.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A design was handed to an operation that presumes compliance but is not IC.
class NotIncentiveCompatible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration problems detected while loading a run manifest.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace mutualsec
