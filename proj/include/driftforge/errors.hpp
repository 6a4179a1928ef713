#pragma once

#include <stdexcept>
#include <string>

namespace driftforge {

// Bad caller input (degenerate interval, horizon below regime, length mismatch).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite state produced while integrating the SDE.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, double state, double time)
      : std::runtime_error(what), state_(state), time_(time) {}

  double state() const noexcept { return state_; }
  double time() const noexcept { return time_; }

 private:
  double state_;
  double time_;
};

// A numerical result is undefined for the given inputs (e.g. unnormalizable density).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A construction invariant was violated; indicates a bug, not bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace driftforge
