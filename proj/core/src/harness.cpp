#include "mflab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mflab/control.hpp"
#include "mflab/estimator.hpp"
#include "mflab/plants.hpp"

namespace mflab {

namespace {

double rms(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return std::sqrt(acc / static_cast<double>(values.size()));
}

}  // namespace

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  validate_gains(scenario.gains, scenario.controller);

  const double h = scenario.sample_period;
  const auto steps = static_cast<long>(std::llround(scenario.duration / h));

  PlantConfig plant_config;
  plant_config.id = scenario.plant;
  plant_config.sample_period = h;
  plant_config.delay = scenario.delay;
  plant_config.noise_std = scenario.noise_std;
  plant_config.seed = scenario.seed;
  Plant plant(plant_config);

  Controller controller(scenario.gains, scenario.controller);
  ReferenceFilter reference(scenario.reference_tau,
                            setpoint_at(scenario.setpoints, 0.0));
  SampledWindow window = SampledWindow::for_span(scenario.estimator_window, h);

  RunResult result;
  result.trace.reserve(steps);
  result.warmup_end = window.span() + scenario.reference_tau;

  const int nu = scenario.gains.nu;
  const double alpha = scenario.gains.alpha;

  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    // Input that actually drove the plant over the interval ending now;
    // under a transport delay the ultra-local model reads
    // y' = F + alpha u(t - tau), so this is also what the window pairs
    // with the measurement.
    const double u_active = plant.applied_input();
    const double y = plant.measure();
    const double y_deriv =
        nu == 1 ? plant.output_rate(u_active) : plant.output_accel(u_active);
    const double f_true = ultra_local_f(y_deriv, u_active, alpha);
    const double setpoint = setpoint_at(scenario.setpoints, t);

    window.push(t, y, u_active);
    double f_est = 0.0;
    if (options.perfect_estimation)
      f_est = f_true;
    else if (const auto estimate = estimate_f(window, alpha))
      f_est = *estimate;
    const bool estimator_ready = options.perfect_estimation || window.full();

    const auto ref = reference.step(setpoint, h);
    const double e = ref.y_star - y;
    const double y_star_deriv = nu == 1 ? ref.y_star_dot : ref.y_star_ddot;

    double u = 0.0;
    try {
      u = controller.step(f_est, y_star_deriv, e, h, estimator_ready);
    } catch (const SignalFault&) {
      // Diagnostic row with the inputs that faulted, then stop.
      result.trace.push_back(
          make_trace_row(t, setpoint, ref.y_star, y, u_active, f_true, f_est));
      result.diverged_at = t;
      break;
    }

    result.trace.push_back(
        make_trace_row(t, setpoint, ref.y_star, y, u, f_true, f_est));

    plant.step(u, h);
    if (plant.diverged()) {
      result.diverged_at = plant.time();
      break;
    }
  }

  // Classification: diverged, or the tail of the output grew three
  // decades past the setpoint scale.
  const double scale = std::max(setpoint_scale(scenario.setpoints), 1e-300);
  double tail_max = 0.0;
  const std::size_t tail_start =
      result.trace.size() - std::min(result.trace.size(),
                                     std::max<std::size_t>(
                                         1, result.trace.size() / 10));
  for (std::size_t i = tail_start; i < result.trace.size(); ++i)
    tail_max = std::max(tail_max, std::abs(result.trace[i].y));
  result.stable = !result.diverged_at && tail_max <= 1e3 * scale;

  std::vector<double> tracking, estimation;
  const double tracking_start = std::max(scenario.duration / 2.0, result.warmup_end);
  for (const TraceRow& row : result.trace) {
    if (row.t >= result.warmup_end) estimation.push_back(row.f_est - row.f_true);
    if (row.t >= tracking_start) tracking.push_back(row.e);
  }
  result.tracking_rmse = rms(tracking);
  result.estimation_rmse = rms(estimation);
  return result;
}

std::vector<DelaySweepPoint> delay_sweep(double kp,
                                         const std::vector<double>& taus,
                                         const Scenario& base,
                                         const RunOptions& options) {
  if (!(kp > 0.0)) throw ValidationError("kp: must be > 0");
  for (double tau : taus) {
    if (tau < 0.0) throw ValidationError("delay: must be >= 0");
    const double ratio = tau / base.sample_period;
    if (std::abs(ratio - std::llround(ratio)) > 1e-6)
      throw ValidationError("delay " + format_double(tau) +
                            " is not a multiple of the sample period");
  }
  std::vector<double> ordered = taus;
  std::sort(ordered.begin(), ordered.end());

  std::vector<DelaySweepPoint> points;
  points.reserve(ordered.size());
  for (double tau : ordered) {
    Scenario scenario = base;
    scenario.gains.kp = kp;
    scenario.delay = tau;
    if (tau > 0.0 && scenario.plant == PlantId::Linear)
      scenario.plant = PlantId::LinearDelayed;
    const RunResult result = run_scenario(scenario, options);
    points.push_back({tau, result.stable, result.tracking_rmse});
  }
  return points;
}

void emit_trace(const RunResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "t,setpoint,y_star,y,u,f_true,f_est,e\n";
  char buf[360];
  for (const TraceRow& r : result.trace) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t,
                  r.setpoint, r.y_star, r.y, r.u, r.f_true, r.f_est, r.e);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace mflab
