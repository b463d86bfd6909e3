#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hetcache {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Aggregated invariant violations from scenario validation.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string msg = "scenario validation failed:";
    for (const auto& s : v) {
      msg += "\n  - ";
      msg += s;
    }
    return msg;
  }
  std::vector<std::string> violations_;
};

// Adaptive integration did not reach the requested tolerance. Carries the
// best estimate and the achieved error bound.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : Error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

// Bisection bracket cannot contain the target (near-opt solver).
class BracketError : public Error {
 public:
  using Error::Error;
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetcache
