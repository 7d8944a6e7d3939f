#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mflab/scenario.hpp"
#include "mflab/types.hpp"

namespace mflab {

struct RunResult {
  std::vector<TraceRow> trace;
  bool stable = true;
  double tracking_rmse = 0.0;    // rms of e over the final half, post warm-up
  double estimation_rmse = 0.0;  // rms of f_est - f_true, post warm-up
  std::optional<double> diverged_at;
  double warmup_end = 0.0;  // full estimator window plus one reference tau
};

struct RunOptions {
  // Bypass the estimator and feed the controller the exact F from the
  // plant equations; the reference oracle for closed-loop tests.
  bool perfect_estimation = false;
};

// One closed-loop experiment at period T_e: measure, window update,
// F estimate, reference step, control step, delay push, plant step.
// Divergence and controller faults end the run early with stable = false
// and never propagate as exceptions.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

struct DelaySweepPoint {
  double tau = 0.0;
  bool stable = false;
  double tracking_rmse = 0.0;
};

/// Runs the base scenario once per delay value (each a multiple of the
/// sample period) with the given kp; results ordered by tau.
std::vector<DelaySweepPoint> delay_sweep(double kp,
                                         const std::vector<double>& taus,
                                         const Scenario& base,
                                         const RunOptions& options = {});

/// CSV with header t,setpoint,y_star,y,u,f_true,f_est,e at full
/// precision; identical runs produce byte-identical files.
void emit_trace(const RunResult& result, const std::string& path);

}  // namespace mflab
