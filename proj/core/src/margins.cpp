#include "mflab/margins.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mflab/cubic.hpp"

namespace mflab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kDegPerRad = 180.0 / kPi;

void require(bool ok, const char* msg) {
  if (!ok) throw ValidationError(msg);
}

// T(jw) of the rational part, no delay factor.
std::complex<double> rational_response(const OpenLoopTF& tf, double omega) {
  const Gains& g = tf.gains;
  switch (tf.kind) {
    case ControllerKind::iP:
      return {0.0, -g.kp / omega};
    case ControllerKind::iPI:
      return {-g.ki / (omega * omega), -g.kp / omega};
    case ControllerKind::iPD:
      return {-g.kp / (omega * omega), -g.kd / omega};
    case ControllerKind::iPID:
      return {-g.kp / (omega * omega),
              g.ki / (omega * omega * omega) - g.kd / omega};
  }
  return {0.0, 0.0};
}

double magnitude(const OpenLoopTF& tf, double omega) {
  return std::abs(rational_response(tf, omega));  // |exp(-jw tau)| = 1
}

// Geometric-midpoint bisection of f on [lo, hi]; f(lo) and f(hi) must
// have opposite signs.
template <typename F>
double bisect(F&& f, double lo, double hi, double f_lo, double rel_tol) {
  while ((hi - lo) > rel_tol * lo) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;  // interval exhausted in doubles
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_lo < 0.0) == (f_mid < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

// Golden-section minimum of f on [lo, hi] in log coordinates.
template <typename F>
std::pair<double, double> golden_min(F&& f, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = std::log(lo), b = std::log(hi);
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
  for (int i = 0; i < 90 && (b - a) > 1e-14; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(std::exp(x2));
    }
  }
  const double x = std::exp(0.5 * (a + b));
  return {x, f(x)};
}

MarginReport finalize(MarginReport report) {
  std::sort(report.gain_crossovers.begin(), report.gain_crossovers.end(),
            [](const GainCrossover& a, const GainCrossover& b) {
              return a.omega < b.omega;
            });
  std::sort(report.phase_crossovers.begin(), report.phase_crossovers.end(),
            [](const PhaseCrossover& a, const PhaseCrossover& b) {
              return a.omega < b.omega;
            });
  if (!report.gain_crossovers.empty()) {
    const auto worst = std::min_element(
        report.gain_crossovers.begin(), report.gain_crossovers.end(),
        [](const GainCrossover& a, const GainCrossover& b) {
          return a.phase_margin_deg < b.phase_margin_deg;
        });
    report.phase_margin_deg = worst->phase_margin_deg;
    report.omega_gain = worst->omega;
  }
  if (!report.phase_crossovers.empty()) {
    const auto worst = std::min_element(
        report.phase_crossovers.begin(), report.phase_crossovers.end(),
        [](const PhaseCrossover& a, const PhaseCrossover& b) {
          return a.gain_margin < b.gain_margin;
        });
    report.gain_margin = worst->gain_margin;
    report.omega_phase = worst->omega;
  }
  return report;
}

}  // namespace

std::optional<double> MarginReport::gain_margin_db() const {
  if (!gain_margin) return std::nullopt;
  return 20.0 * std::log10(*gain_margin);
}

std::complex<double> evaluate(const OpenLoopTF& tf, double omega) {
  require(omega > 0.0, "omega: must be > 0 (loop gain is singular at 0)");
  std::complex<double> t = rational_response(tf, omega);
  if (tf.delay > 0.0)
    t *= std::polar(1.0, -omega * tf.delay);
  return t;
}

double phase_deg(const OpenLoopTF& tf, double omega) {
  require(omega > 0.0, "omega: must be > 0 (loop gain is singular at 0)");
  const std::complex<double> t = rational_response(tf, omega);
  double phi = std::atan2(t.imag(), t.real()) * kDegPerRad;
  // The rational locus never enters the right half plane, so a positive
  // principal value is the branch above -180; shift onto the continuous
  // branch in (-270, -90].
  if (phi > 0.0) phi -= 360.0;
  return phi - omega * tf.delay * kDegPerRad;
}

MarginReport margins_ip(const Gains& g) {
  require(g.kp > 0.0, "kp: must be > 0");
  MarginReport report;
  report.gain_crossovers = {{g.kp, 90.0}};
  // Phase is -90 for every omega: no phase crossover, infinite gain margin.
  return finalize(report);
}

MarginReport margins_ipi(const Gains& g) {
  require(g.kp > 0.0, "kp: must be > 0");
  require(g.ki > 0.0, "ki: must be > 0 (for ki = 0 use margins_ip)");
  const double kp2 = g.kp * g.kp;
  const double omega_m =
      std::sqrt((kp2 + std::sqrt(kp2 * kp2 + 4.0 * g.ki * g.ki)) / 2.0);
  const double pm = std::atan(g.kp * omega_m / g.ki) * kDegPerRad;
  MarginReport report;
  report.gain_crossovers = {{omega_m, pm}};
  return finalize(report);
}

MarginReport margins_ipd(const Gains& g) {
  require(g.kp > 0.0, "kp: must be > 0");
  require(g.kd > 0.0, "kd: must be > 0 (for kd = 0 there is no iPD loop)");
  // Same locus as iPI with kd in the 1/s slot and kp in the 1/s^2 slot.
  const double kd2 = g.kd * g.kd;
  const double omega_m =
      std::sqrt((kd2 + std::sqrt(kd2 * kd2 + 4.0 * g.kp * g.kp)) / 2.0);
  const double pm = std::atan(g.kd * omega_m / g.kp) * kDegPerRad;
  MarginReport report;
  report.gain_crossovers = {{omega_m, pm}};
  return finalize(report);
}

MarginReport margins_ipid(const Gains& g) {
  require(g.kp > 0.0, "kp: must be > 0");
  require(g.ki > 0.0, "ki: must be > 0");
  require(g.kd > 0.0, "kd: must be > 0");

  MarginReport report;
  const double omega_pi = std::sqrt(g.ki / g.kd);
  report.phase_crossovers = {{omega_pi, g.ki / (g.kd * g.kp)}};

  // |T(jw)| = 1 cleared of denominators, in x = w^2. The cubic is
  // negative at 0 and grows to +inf, so a positive root always exists;
  // for some gain sets all three roots are positive (the locus dips
  // through the unit circle more than once).
  const CubicRoots roots = solve_cubic(
      -g.kd * g.kd, 2.0 * g.kd * g.ki - g.kp * g.kp, -g.ki * g.ki);
  for (int i = 0; i < roots.count; ++i) {
    const double x = roots.roots[i];
    if (x <= 0.0) continue;
    const double omega = std::sqrt(x);
    const double pm =
        std::atan((g.kd * x - g.ki) / (g.kp * omega)) * kDegPerRad;
    report.gain_crossovers.push_back({omega, pm});
  }
  return finalize(report);
}

MarginReport margins_analytic(const OpenLoopTF& tf) {
  if (tf.delay != 0.0)
    throw ValidationError(
        "analytic margins cover undelayed loops only; use margins_numeric");
  validate_gains(tf.gains, tf.kind);
  switch (tf.kind) {
    case ControllerKind::iP:
      return margins_ip(tf.gains);
    case ControllerKind::iPI:
      return margins_ipi(tf.gains);
    case ControllerKind::iPD:
      return margins_ipd(tf.gains);
    case ControllerKind::iPID:
      return margins_ipid(tf.gains);
  }
  throw ValidationError("unknown controller kind");
}

MarginReport margins_numeric(const OpenLoopTF& tf, const SweepOptions& opt) {
  require(opt.omega_min > 0.0 && opt.omega_max > opt.omega_min,
          "omega range: need 0 < omega_min < omega_max");
  require(opt.grid_points >= 2, "grid_points: need at least 2");
  require(opt.tolerance > 0.0, "tolerance: must be > 0");
  require(tf.delay >= 0.0, "delay: must be >= 0");
  validate_gains(tf.gains, tf.kind);

  const int n = opt.grid_points;
  const double log_min = std::log(opt.omega_min);
  const double log_step = (std::log(opt.omega_max) - log_min) / (n - 1);

  std::vector<double> omega(n);
  std::vector<double> gain_err(n);  // |T| - 1
  std::vector<double> im(n), re(n);
  for (int i = 0; i < n; ++i) {
    omega[i] = std::exp(log_min + i * log_step);
    const std::complex<double> t = evaluate(tf, omega[i]);
    re[i] = t.real();
    im[i] = t.imag();
    gain_err[i] = std::abs(t) - 1.0;
  }

  MarginReport report;

  const auto mag_err = [&](double w) { return magnitude(tf, w) - 1.0; };
  const auto add_gain_crossover = [&](double w) {
    report.gain_crossovers.push_back({w, 180.0 + phase_deg(tf, w)});
  };
  for (int i = 0; i + 1 < n; ++i) {
    if (gain_err[i] == 0.0)
      add_gain_crossover(omega[i]);
    else if ((gain_err[i] < 0.0) != (gain_err[i + 1] < 0.0))
      add_gain_crossover(
          bisect(mag_err, omega[i], omega[i + 1], gain_err[i], opt.tolerance));
  }
  if (gain_err[n - 1] == 0.0) add_gain_crossover(omega[n - 1]);

  // A dip through |T| = 1 narrower than the grid shows up as a positive
  // local minimum (or a hump as a negative local maximum): refine the
  // extremum and split it into its two bracketed crossings.
  for (int i = 1; i + 1 < n; ++i) {
    const bool hidden_dip = gain_err[i] > 0.0 && gain_err[i - 1] > gain_err[i] &&
                            gain_err[i] <= gain_err[i + 1] &&
                            gain_err[i - 1] > 0.0 && gain_err[i + 1] > 0.0;
    const bool hidden_hump = gain_err[i] < 0.0 &&
                             gain_err[i - 1] < gain_err[i] &&
                             gain_err[i] >= gain_err[i + 1] &&
                             gain_err[i - 1] < 0.0 && gain_err[i + 1] < 0.0;
    if (!hidden_dip && !hidden_hump) continue;
    const double sign = hidden_dip ? 1.0 : -1.0;
    const auto [w_ext, f_ext] = golden_min(
        [&](double w) { return sign * mag_err(w); }, omega[i - 1], omega[i + 1]);
    if (f_ext >= 0.0) continue;  // the extremum never reaches |T| = 1
    add_gain_crossover(bisect(mag_err, omega[i - 1], w_ext,
                              gain_err[i - 1], opt.tolerance));
    add_gain_crossover(
        bisect(mag_err, w_ext, omega[i + 1], sign * f_ext, opt.tolerance));
  }

  const auto imag_part = [&](double w) { return evaluate(tf, w).imag(); };
  for (int i = 0; i + 1 < n; ++i) {
    double w = 0.0;
    if (im[i] == 0.0) {
      if (re[i] >= 0.0) continue;
      w = omega[i];
    } else if ((im[i] < 0.0) != (im[i + 1] < 0.0)) {
      w = bisect(imag_part, omega[i], omega[i + 1], im[i], opt.tolerance);
      if (evaluate(tf, w).real() >= 0.0) continue;  // crossing of 0 deg, not -180
    } else {
      continue;
    }
    report.phase_crossovers.push_back({w, 1.0 / std::abs(evaluate(tf, w))});
  }

  report = finalize(report);
  if (report.gain_crossovers.empty()) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "no gain crossover: |T| never meets 1 on [%g, %g] rad/s",
                  opt.omega_min, opt.omega_max);
    report.note = buf;
  }
  return report;
}

double delay_margin_ip(double kp) {
  require(kp > 0.0, "kp: must be > 0");
  return kPi / (2.0 * kp);
}

double ipi_ki_for_45deg(double kp) {
  require(kp > 0.0, "kp: must be > 0");
  return std::sqrt(2.0) * kp * kp;
}

std::vector<NyquistRow> nyquist_sample(const OpenLoopTF& tf, double omega_min,
                                       double omega_max, int n_points) {
  require(omega_min > 0.0 && omega_max > omega_min,
          "omega range: need 0 < omega_min < omega_max");
  require(n_points >= 2, "n_points: need at least 2");
  std::vector<NyquistRow> rows;
  rows.reserve(n_points);
  const double log_min = std::log(omega_min);
  const double log_step = (std::log(omega_max) - log_min) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) {
    const double w = std::exp(log_min + i * log_step);
    const std::complex<double> t = evaluate(tf, w);
    rows.push_back(
        {w, t.real(), t.imag(), 20.0 * std::log10(std::abs(t)), phase_deg(tf, w)});
  }
  return rows;
}

void write_nyquist_csv(const std::vector<NyquistRow>& rows,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "omega,re,im,gain_db,phase_deg\n";
  char buf[220];
  for (const NyquistRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.omega,
                  r.re, r.im, r.gain_db, r.phase_deg);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace mflab
