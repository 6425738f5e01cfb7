#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace momlasso {

// Invalid arguments are reported with std::invalid_argument; the types below
// cover the failure modes that callers are expected to handle separately.

/// A rate schedule (rho_K, lambda window) could not be computed.
class ScheduleInfeasible : public std::runtime_error {
 public:
  ScheduleInfeasible(const std::string& what, std::string diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

/// Configuration values are individually valid but jointly unusable.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver produced a non-finite iterate.
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace momlasso
