#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fleetpoa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix dimensions that do not line up.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Path enumeration produced more paths than the configured cap.
class PathLimitExceeded : public Error {
 public:
  using Error::Error;
};

/// A precondition on the input values was violated (negative flow, bad alpha...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The equilibrium solver was asked to run without a passing conditions check.
class ConditionsUnverified : public Error {
 public:
  using Error::Error;
};

/// A structural assumption of an analysis (single OD pair, parallel network) does not hold.
class AssumptionViolated : public Error {
 public:
  using Error::Error;
};

/// Brute-force oracle grid is too large to scan.
class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

/// Network file could not be read, parsed or validated.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::vector<std::string> violations = {})
      : Error(what), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace fleetpoa
