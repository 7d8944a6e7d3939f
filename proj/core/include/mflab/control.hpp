#pragma once

#include "mflab/types.hpp"

namespace mflab {

/// Discrete-time intelligent controller
///
///   u = (-F_est + y*^(nu) + Kp e [+ Ki int_e] [+ Kd de]) / alpha
///
/// with the integral accumulated by the rectangle rule and the
/// derivative by backward difference. No anti-windup, no saturation.
class Controller {
 public:
  Controller(const Gains& gains, ControllerKind kind);

  // y_star_deriv is dy*/dt for nu = 1 and d2y*/dt2 for nu = 2. While
  // estimator_ready is false the loop is blind to F, so only the
  // feedforward and proportional terms act and the integral stays
  // frozen. Non-finite inputs raise SignalFault.
  double step(double f_est, double y_star_deriv, double e, double sample_period,
              bool estimator_ready = true);

  void reset();

  double integral() const { return integral_; }

 private:
  Gains gains_;
  ControllerKind kind_;
  double integral_ = 0.0;
  double previous_error_ = 0.0;
  bool has_previous_ = false;
};

/// Critically damped second-order reference filter: y* follows the
/// setpoint through 1/(tau s + 1)^2, advanced by the exact discrete
/// transition so y*, dy*, d2y* come from the filter states and never
/// from differencing the output. y* stays continuous across setpoint
/// jumps. tau = 0 degenerates to pass-through.
class ReferenceFilter {
 public:
  ReferenceFilter(double tau, double initial_setpoint);

  struct Output {
    double y_star = 0.0;
    double y_star_dot = 0.0;
    double y_star_ddot = 0.0;
  };

  /// Advances one sample with the setpoint held constant over it and
  /// returns the new reference point.
  Output step(double setpoint, double sample_period);

  Output current() const;

 private:
  double tau_;
  double setpoint_;
  double deviation_ = 0.0;  // y* - setpoint
  double rate_ = 0.0;       // dy*/dt
};

}  // namespace mflab
