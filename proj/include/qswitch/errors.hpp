#pragma once

#include <stdexcept>
#include <string>

namespace qswitch {

/// Malformed or inconsistent network configuration. `where` is a JSON
/// pointer ("/switches/0/endpoints/1") or "line L, column C" for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& message)
      : std::runtime_error(where.empty() ? message : where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// A dispersive formula evaluated at (or numerically at) resonance.
class ResonanceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Integrator failures: step-size convergence, invalid state during evolution.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qswitch
