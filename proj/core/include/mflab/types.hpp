#pragma once

#include <stdexcept>
#include <string>

namespace mflab {

/// Raised on invalid gains, malformed scenario files, bad CLI arguments.
/// The CLI maps it to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised on file read/write failures. The CLI maps it to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a non-finite value enters the control law; the harness
/// converts it into a diagnostic trace row instead of crashing the run.
struct SignalFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ControllerKind { iP, iPI, iPD, iPID };

enum class PlantId { Nonlinear, Linear, LinearDelayed };

/// Derivation order of the ultra-local model implied by the controller:
/// 1 for iP/iPI, 2 for iPD/iPID.
int controller_order(ControllerKind kind);

std::string to_string(ControllerKind kind);
std::string to_string(PlantId id);
ControllerKind controller_from_string(const std::string& name);
PlantId plant_from_string(const std::string& name);

/// Tuning gains of an intelligent controller plus the input scaling and
/// the derivation order of the underlying ultra-local model.
struct Gains {
  double kp = 0.0;   // proportional, dimensionless
  double ki = 0.0;   // integral, 1/s
  double kd = 0.0;   // derivative, s
  double alpha = 1.0;
  int nu = 1;        // 1 or 2

  bool operator==(const Gains&) const = default;
};

// Enforces kp > 0, ki/kd >= 0, alpha != 0, nu in {1,2}, and the
// per-controller nonzero pattern (iP: kp only; iPI: kp,ki; iPD: kp,kd;
// iPID: kp,ki,kd). Throws ValidationError naming the offending field.
void validate_gains(const Gains& gains, ControllerKind kind);

/// One closed-loop sample. e is always y_star - y.
struct TraceRow {
  double t = 0.0;
  double setpoint = 0.0;
  double y_star = 0.0;  // reference trajectory
  double y = 0.0;       // measured output
  double u = 0.0;       // commanded control
  double f_true = 0.0;  // exact F from the plant equations
  double f_est = 0.0;   // estimator output (0 during warm-up)
  double e = 0.0;       // y_star - y

  bool operator==(const TraceRow&) const = default;
};

inline TraceRow make_trace_row(double t, double setpoint, double y_star,
                               double y, double u, double f_true,
                               double f_est) {
  return TraceRow{t, setpoint, y_star, y, u, f_true, f_est, y_star - y};
}

}  // namespace mflab
