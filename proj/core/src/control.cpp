#include "mflab/control.hpp"

#include <cmath>

namespace mflab {

Controller::Controller(const Gains& gains, ControllerKind kind)
    : gains_(gains), kind_(kind) {
  validate_gains(gains, kind);
}

double Controller::step(double f_est, double y_star_deriv, double e,
                        double sample_period, bool estimator_ready) {
  if (!(sample_period > 0.0))
    throw ValidationError("sample_period: must be > 0");
  if (!std::isfinite(f_est) || !std::isfinite(y_star_deriv) ||
      !std::isfinite(e))
    throw SignalFault("non-finite controller input");

  double feedback = gains_.kp * e;
  if (estimator_ready) {
    const bool use_integral =
        kind_ == ControllerKind::iPI || kind_ == ControllerKind::iPID;
    const bool use_derivative =
        kind_ == ControllerKind::iPD || kind_ == ControllerKind::iPID;
    if (use_integral) {
      integral_ += e * sample_period;  // rectangle rule
      feedback += gains_.ki * integral_;
    }
    if (use_derivative) {
      const double e_dot =
          has_previous_ ? (e - previous_error_) / sample_period : 0.0;
      feedback += gains_.kd * e_dot;
    }
  }
  previous_error_ = e;
  has_previous_ = true;

  const double u = (-f_est + y_star_deriv + feedback) / gains_.alpha;
  if (!std::isfinite(u)) throw SignalFault("non-finite control output");
  return u;
}

void Controller::reset() {
  integral_ = 0.0;
  previous_error_ = 0.0;
  has_previous_ = false;
}

ReferenceFilter::ReferenceFilter(double tau, double initial_setpoint)
    : tau_(tau), setpoint_(initial_setpoint) {
  if (tau < 0.0) throw ValidationError("reference_tau: must be >= 0");
}

ReferenceFilter::Output ReferenceFilter::step(double setpoint,
                                              double sample_period) {
  if (!(sample_period > 0.0))
    throw ValidationError("sample_period: must be > 0");
  if (setpoint != setpoint_) {
    // Re-base the deviation so y* does not jump with the setpoint.
    deviation_ += setpoint_ - setpoint;
    setpoint_ = setpoint;
  }
  if (tau_ == 0.0) {
    deviation_ = 0.0;
    rate_ = 0.0;
    return current();
  }
  // Exact transition of d'' = -d/tau^2 - 2 d'/tau over one sample
  // (repeated eigenvalue -1/tau): exp(A h) = exp(-h/tau) (I + (A + I/tau) h).
  const double h = sample_period;
  const double decay = std::exp(-h / tau_);
  const double d = deviation_;
  const double v = rate_;
  deviation_ = decay * ((1.0 + h / tau_) * d + h * v);
  rate_ = decay * (-(h / (tau_ * tau_)) * d + (1.0 - h / tau_) * v);
  return current();
}

ReferenceFilter::Output ReferenceFilter::current() const {
  Output out;
  out.y_star = setpoint_ + deviation_;
  out.y_star_dot = rate_;
  out.y_star_ddot =
      tau_ == 0.0 ? 0.0 : -deviation_ / (tau_ * tau_) - 2.0 * rate_ / tau_;
  return out;
}

}  // namespace mflab
