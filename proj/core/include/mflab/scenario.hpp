#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mflab/types.hpp"

namespace mflab {

/// Piecewise-constant setpoint schedule entry: the setpoint takes `value`
/// from time `t` until the next entry (the last value holds to the end).
struct SetpointStep {
  double t = 0.0;
  double value = 0.0;

  bool operator==(const SetpointStep&) const = default;
};

/// Complete description of one closed-loop experiment.
struct Scenario {
  PlantId plant = PlantId::Linear;
  ControllerKind controller = ControllerKind::iP;
  Gains gains;
  double sample_period = 0.01;    // T_e, s
  double estimator_window = 0.01; // window length, s
  double delay = 0.0;             // input transport delay, s
  double noise_std = 0.0;         // output noise standard deviation
  double duration = 30.0;         // s
  std::vector<SetpointStep> setpoints;
  double reference_tau = 0.5;     // reference filter time constant, s
  std::uint64_t seed = 0;

  bool operator==(const Scenario&) const = default;
};

/// Setpoint value at time t (value of the last entry with entry.t <= t;
/// the first entry's value before it).
double setpoint_at(const std::vector<SetpointStep>& schedule, double t);

/// Largest |setpoint| over the schedule, used by the stability classifier.
double setpoint_scale(const std::vector<SetpointStep>& schedule);

// Parses a key=value scenario document. Required keys: plant, kp,
// sample_period. Everything else falls back to documented defaults,
// including an alternating +/-1 step schedule every 5 s. Throws
// ValidationError naming every missing or offending key.
Scenario parse_scenario(const std::string& text);

/// Renders a Scenario back to the key=value format accepted by
/// parse_scenario; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

Scenario load_scenario_file(const std::string& path);

/// Full-precision decimal rendering that round-trips through parsing.
std::string format_double(double v);

}  // namespace mflab
