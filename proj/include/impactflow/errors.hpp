#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace impactflow {

/// Configuration file or parameter-validation failure (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The drift-domination gate gamma >= alpha1*beta1/8 failed; the dynamic
/// program refuses to run (CLI exit code 3).
struct DriftConditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A liquidation strategy violates admissibility: negative rate, breakpoints
/// off the simulation grid, or total sales exceeding the holdings
/// (CLI exit code 4).
struct StrategyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested reproduction scenario is not registered (CLI exit code 5).
struct UnknownScenarioError : std::runtime_error {
  UnknownScenarioError(const std::string& name, std::vector<std::string> known_names)
      : std::runtime_error("unknown scenario '" + name + "'"), known(std::move(known_names)) {}
  std::vector<std::string> known;
};

}  // namespace impactflow
