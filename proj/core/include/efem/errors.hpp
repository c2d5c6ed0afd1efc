#pragma once

#include <stdexcept>
#include <string>

namespace efem {

// Velocity field evaluated to a non-finite value, or the ODE left the
// representable range. Carries the offending (t,x).
class FlowIntegrationError : public std::runtime_error {
 public:
  FlowIntegrationError(const std::string& what, double t)
      : std::runtime_error(what), time(t) {}
  double time;
};

// Jacobian determinant dropped to <= 0 along a trajectory.
class DegenerateFlowError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reverse-time integration failed to invert the flow to tolerance.
class FlowInversionError : public std::runtime_error {
 public:
  FlowInversionError(const std::string& what, double res)
      : std::runtime_error(what), residual(res) {}
  double residual;
};

class InvalidMeshError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Mesh tangling or a singular local solve during form assembly.
class AssemblyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Newton stagnated; carries the last residual norm.
class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& what, double res)
      : std::runtime_error(what), last_residual(res) {}
  double last_residual;
};

// Scenario file problems; message includes the offending line number(s).
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace efem
