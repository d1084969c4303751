#pragma once

#include <stdexcept>
#include <string>

namespace wcl {

/// Malformed or inconsistent user input (files, ids, parameters).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested model has no feasible solution.
class InfeasibleModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A route cannot reach the SOC threshold even with every segment electrified.
class InsufficientChargingError : public InfeasibleModelError {
 public:
  using InfeasibleModelError::InfeasibleModelError;
};

/// A numerical procedure did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

}  // namespace wcl
