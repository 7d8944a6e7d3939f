#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "mflab/types.hpp"

namespace mflab {

/// Open-loop transfer function of one intelligent-controller family,
/// optionally cascaded with an input delay exp(-tau*s):
///   iP    Kp/s
///   iPI   Kp/s + Ki/s^2
///   iPD   Kp/s^2 + Kd/s
///   iPID  Kp/s^2 + Ki/s^3 + Kd/s
struct OpenLoopTF {
  ControllerKind kind = ControllerKind::iP;
  Gains gains;
  double delay = 0.0;  // tau, s
};

/// One solution of |T(jw)| = 1 with the loop phase margin there.
struct GainCrossover {
  double omega = 0.0;
  double phase_margin_deg = 0.0;
};

/// One solution of arg T(jw) = -180 deg (mod 360) with 1/|T| there.
struct PhaseCrossover {
  double omega = 0.0;
  double gain_margin = 0.0;  // linear scale
};

struct MarginReport {
  // Worst case over all crossovers. gain_margin empty means +infinity
  // (the locus never crosses the negative real axis); omega_gain empty
  // means no gain crossover was found in the examined range, with `note`
  // saying why.
  std::optional<double> gain_margin;
  std::optional<double> phase_margin_deg;
  std::optional<double> omega_gain;
  std::optional<double> omega_phase;
  std::vector<GainCrossover> gain_crossovers;
  std::vector<PhaseCrossover> phase_crossovers;
  std::string note;

  std::optional<double> gain_margin_db() const;
};

/// T(j*omega), delay factor included. omega must be > 0: every family is
/// singular at omega = 0.
std::complex<double> evaluate(const OpenLoopTF& tf, double omega);

/// Loop phase in degrees, continuous in omega: the rational part lies in
/// (-270, -90) for all four families and the delay contributes
/// -omega*tau*180/pi on top. Never computed by unwrapping samples.
double phase_deg(const OpenLoopTF& tf, double omega);

// Closed-form margins. Preconditions follow the family: kp > 0 always,
// ki > 0 for iPI/iPID, kd > 0 for iPD/iPID; violations throw
// ValidationError. margins_ipi refuses ki = 0 (use margins_ip).
MarginReport margins_ip(const Gains& gains);
MarginReport margins_ipi(const Gains& gains);
MarginReport margins_ipd(const Gains& gains);
// The iPID gain crossover solves x^3 - Kd^2 x^2 + (2 Kd Ki - Kp^2) x
// - Ki^2 = 0 in x = w^2 (Cardano); with several positive roots the
// report carries the worst (smallest) phase margin and lists the rest.
MarginReport margins_ipid(const Gains& gains);

/// Dispatch on gains/kind; delay must be 0 (closed forms do not cover
/// delayed loops, use margins_numeric for those).
MarginReport margins_analytic(const OpenLoopTF& tf);

struct SweepOptions {
  double omega_min = 1e-3;
  double omega_max = 1e3;
  int grid_points = 4096;    // log-spaced scan resolution
  double tolerance = 1e-13;  // relative omega tolerance of the bisection
};

/// Frequency-sweep oracle: locates every |T| = 1 and Im T = 0 (Re < 0)
/// crossing on a log grid, refines each by bisection, and reports the
/// worst-case margins. Handles delayed loops. Independent of the closed
/// forms above.
MarginReport margins_numeric(const OpenLoopTF& tf, const SweepOptions& opt = {});

/// Largest input delay the iP loop tolerates: pi / (2 Kp).
double delay_margin_ip(double kp);

/// Ki giving the iPI loop a 45 degree phase margin for a given Kp
/// (w_m = Ki/Kp there), i.e. Ki = sqrt(2) * Kp^2.
double ipi_ki_for_45deg(double kp);

struct NyquistRow {
  double omega = 0.0;
  double re = 0.0;
  double im = 0.0;
  double gain_db = 0.0;
  double phase_deg = 0.0;
};

/// Log-spaced frequency response sweep, rows ordered by omega.
std::vector<NyquistRow> nyquist_sample(const OpenLoopTF& tf, double omega_min,
                                       double omega_max, int n_points);

/// CSV with header omega,re,im,gain_db,phase_deg at full precision.
void write_nyquist_csv(const std::vector<NyquistRow>& rows,
                       const std::string& path);

}  // namespace mflab
