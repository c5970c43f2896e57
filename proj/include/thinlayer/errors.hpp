#pragma once

#include <stdexcept>
#include <string>

namespace thinlayer {

// Bad arguments: out-of-range degree, z = 0 for h_n, too few fit points...
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Recurrence over/underflow.
struct NumericRangeError : std::range_error {
  using std::range_error::range_error;
};

// Singular or ill-conditioned linear system. Carries the estimate that tripped the cap.
struct IllConditionedError : std::runtime_error {
  double condition;
  std::string block;
  IllConditionedError(const std::string& what, double cond, std::string blk = {})
      : std::runtime_error(what), condition(cond), block(std::move(blk)) {}
};

// Model/material combination outside a formulation's assumptions.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  std::string key;
  ConfigError(const std::string& k, const std::string& msg)
      : std::runtime_error(k + ": " + msg), key(k) {}
};

}  // namespace thinlayer
