#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace zakai {

// Thrown when a simulated path or weight turns non-finite mid-run. Carries the
// time-step index at which the blow-up was detected so callers can report it.
class SimulationError : public std::runtime_error {
public:
  SimulationError(const std::string& what, std::int64_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::int64_t step() const noexcept { return step_; }

private:
  std::int64_t step_;
};

}  // namespace zakai
