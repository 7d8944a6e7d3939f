#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <random>

#include "mflab/cubic.hpp"
#include "mflab/margins.hpp"

using namespace mflab;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

Gains ip_gains(double kp) { return Gains{kp, 0.0, 0.0, 1.0, 1}; }
Gains ipi_gains(double kp, double ki) { return Gains{kp, ki, 0.0, 1.0, 1}; }
Gains ipd_gains(double kp, double kd) { return Gains{kp, 0.0, kd, 1.0, 2}; }
Gains ipid_gains(double kp, double ki, double kd) {
  return Gains{kp, ki, kd, 1.0, 2};
}

// |a - b| within rel of the larger magnitude (floored at 1 for the
// degree-scaled comparisons).
bool close_rel(double a, double b, double rel, double floor_scale = 1.0) {
  return std::abs(a - b) <=
         rel * std::max({floor_scale, std::abs(a), std::abs(b)});
}

void check_matches_numeric(const OpenLoopTF& tf, double rel = 1e-6) {
  const MarginReport analytic = margins_analytic(tf);
  const MarginReport numeric = margins_numeric(tf);
  REQUIRE(analytic.phase_margin_deg.has_value());
  REQUIRE(numeric.phase_margin_deg.has_value());
  CHECK(close_rel(*analytic.phase_margin_deg, *numeric.phase_margin_deg, rel));
  CHECK(close_rel(*analytic.omega_gain, *numeric.omega_gain, rel));
  CHECK(analytic.gain_margin.has_value() == numeric.gain_margin.has_value());
  if (analytic.gain_margin && numeric.gain_margin) {
    CHECK(close_rel(*analytic.gain_margin, *numeric.gain_margin, rel));
    CHECK(close_rel(*analytic.omega_phase, *numeric.omega_phase, rel));
  }
}

}  // namespace

TEST_SUITE_BEGIN("margins");

TEST_CASE("evaluate: hand-checked points") {
  const std::complex<double> ip = evaluate({ControllerKind::iP, ip_gains(1.0)}, 1.0);
  CHECK(ip.real() == 0.0);
  CHECK(ip.imag() == -1.0);

  const std::complex<double> ipi =
      evaluate({ControllerKind::iPI, ipi_gains(1.0, 1.0)}, 1.0);
  CHECK(ipi.real() == -1.0);
  CHECK(ipi.imag() == -1.0);

  // -Kp/w^2 + j (Ki/w^3 - Kd/w) at w = 2 with Kp=1, Ki=4, Kd=1.
  const std::complex<double> ipid =
      evaluate({ControllerKind::iPID, ipid_gains(1.0, 4.0, 1.0)}, 2.0);
  CHECK(ipid.real() == -0.25);
  CHECK(ipid.imag() == 0.0);

  CHECK_THROWS_AS(evaluate({ControllerKind::iP, ip_gains(1.0)}, 0.0),
                  ValidationError);
  CHECK_THROWS_AS(evaluate({ControllerKind::iP, ip_gains(1.0)}, -2.0),
                  ValidationError);
}

TEST_CASE("evaluate: delay factor is exactly exp(-j w tau)") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> logu(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    OpenLoopTF tf{ControllerKind::iPID,
                  ipid_gains(std::pow(10.0, logu(rng)), std::pow(10.0, logu(rng)),
                             std::pow(10.0, logu(rng)))};
    const double omega = std::pow(10.0, logu(rng));
    const double tau = std::abs(logu(rng));
    OpenLoopTF delayed = tf;
    delayed.delay = tau;
    const std::complex<double> expected =
        evaluate(tf, omega) * std::polar(1.0, -omega * tau);
    const std::complex<double> got = evaluate(delayed, omega);
    CHECK(std::abs(got - expected) <= 1e-12 * std::abs(expected));
  }
}

TEST_CASE("iP margins") {
  MarginReport r = margins_ip(ip_gains(1.0));
  CHECK(*r.phase_margin_deg == 90.0);
  CHECK(!r.gain_margin.has_value());  // +infinity
  CHECK(!r.gain_margin_db().has_value());
  CHECK(*r.omega_gain == 1.0);
  CHECK(!r.omega_phase.has_value());

  r = margins_ip(ip_gains(10.0));
  CHECK(*r.phase_margin_deg == 90.0);
  CHECK(*r.omega_gain == 10.0);

  CHECK(*margins_ip(ip_gains(0.5)).omega_gain == 0.5);
  CHECK_THROWS_AS(margins_ip(ip_gains(0.0)), ValidationError);
  CHECK_THROWS_AS(margins_ip(ip_gains(-1.0)), ValidationError);
}

TEST_CASE("iPI margins at unit gains") {
  const MarginReport r = margins_ipi(ipi_gains(1.0, 1.0));
  // w_m = sqrt((1 + sqrt 5)/2), the square root of the golden ratio.
  CHECK(*r.omega_gain ==
        doctest::Approx(1.2720196495140689).epsilon(1e-14));
  CHECK(*r.phase_margin_deg == doctest::Approx(51.8273).epsilon(1e-5));
  CHECK(!r.gain_margin.has_value());
  check_matches_numeric({ControllerKind::iPI, ipi_gains(1.0, 1.0)});
}

TEST_CASE("iPI 45 degree design point: w_m = Ki/Kp") {
  // Ki = sqrt(2) Kp^2 puts the crossover exactly at Ki/Kp.
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> logu(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double kp = std::pow(10.0, logu(rng));
    const double ki = ipi_ki_for_45deg(kp);
    const MarginReport r = margins_ipi(ipi_gains(kp, ki));
    CHECK(*r.phase_margin_deg == doctest::Approx(45.0).epsilon(1e-12));
    CHECK(*r.omega_gain == doctest::Approx(ki / kp).epsilon(1e-12));
  }
}

TEST_CASE("iPI degenerates to iP as Ki -> 0") {
  CHECK(*margins_ipi(ipi_gains(1.0, 1e-9)).phase_margin_deg ==
        doctest::Approx(90.0).epsilon(1e-6));
  // Ki = 0 is an error, not a silent fallback.
  CHECK_THROWS_AS(margins_ipi(ipi_gains(1.0, 0.0)), ValidationError);
}

TEST_CASE("iPD mirrors iPI field by field") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> logu(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = std::pow(10.0, logu(rng));
    const double b = std::pow(10.0, logu(rng));
    const MarginReport pd = margins_ipd(ipd_gains(a, b));
    const MarginReport pi = margins_ipi(ipi_gains(b, a));
    CHECK(*pd.phase_margin_deg == *pi.phase_margin_deg);
    CHECK(*pd.omega_gain == *pi.omega_gain);
    CHECK(pd.gain_margin.has_value() == pi.gain_margin.has_value());
  }
}

TEST_CASE("iPD crossover solves w^4 - Kd^2 w^2 - Kp^2 = 0") {
  MarginReport r = margins_ipd(ipd_gains(2.0, 1.0));
  const double x = *r.omega_gain * *r.omega_gain;
  CHECK(x == doctest::Approx((1.0 + std::sqrt(17.0)) / 2.0).epsilon(1e-14));

  r = margins_ipd(ipd_gains(4.0, 1.0));
  const double x4 = *r.omega_gain * *r.omega_gain;
  CHECK(x4 == doctest::Approx((1.0 + std::sqrt(65.0)) / 2.0).epsilon(1e-14));

  check_matches_numeric({ControllerKind::iPD, ipd_gains(1.0, 2.0)});
  check_matches_numeric({ControllerKind::iPD, ipd_gains(2.0, 1.0)});
  check_matches_numeric({ControllerKind::iPD, ipd_gains(4.0, 1.0)});
}

TEST_CASE("iPID closed forms at Kp=1, Ki=4, Kd=1") {
  const MarginReport r = margins_ipid(ipid_gains(1.0, 4.0, 1.0));
  // Phase crossover: Im T = 0 at w = sqrt(Ki/Kd) = 2 where T = -Kp Kd/Ki.
  CHECK(*r.omega_phase == 2.0);
  CHECK(*r.gain_margin == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(std::abs(evaluate({ControllerKind::iPID, ipid_gains(1.0, 4.0, 1.0)},
                          *r.omega_phase)) ==
        doctest::Approx(0.25).epsilon(1e-15));
  check_matches_numeric({ControllerKind::iPID, ipid_gains(1.0, 4.0, 1.0)}, 1e-9);
}

TEST_CASE("iPID crossover cubic x^3 - 4x^2 + 3x - 1 at Kp=1, Ki=1, Kd=2") {
  const MarginReport r = margins_ipid(ipid_gains(1.0, 1.0, 2.0));
  const MarginReport oracle =
      margins_numeric({ControllerKind::iPID, ipid_gains(1.0, 1.0, 2.0)});
  CHECK(close_rel(*r.omega_gain, *oracle.omega_gain, 1e-9));
  CHECK(close_rel(*r.phase_margin_deg, *oracle.phase_margin_deg, 1e-9));
  CHECK(*r.omega_gain == doctest::Approx(1.7745).epsilon(5e-4));
  CHECK(*r.phase_margin_deg == doctest::Approx(71.5).epsilon(1e-3));
  // The root really solves the cleared-magnitude cubic.
  const double x = *r.omega_gain * *r.omega_gain;
  CHECK(cubic_residual_scaled(-4.0, 3.0, -1.0, x) <= 1e-12);
}

TEST_CASE("iPID with unit gains sits on the margin: GM = 1") {
  const MarginReport r = margins_ipid(ipid_gains(1.0, 1.0, 1.0));
  CHECK(*r.gain_margin == 1.0);
  CHECK(*r.omega_phase == 1.0);
  CHECK_THROWS_AS(margins_ipid(ipid_gains(1.0, 0.0, 1.0)), ValidationError);
  CHECK_THROWS_AS(margins_ipid(ipid_gains(0.0, 1.0, 1.0)), ValidationError);
  CHECK_THROWS_AS(margins_ipid(ipid_gains(1.0, 1.0, -1.0)), ValidationError);
}

TEST_CASE("iPID worst case kept when the locus crosses |T|=1 three times") {
  // Kp=0.1, Ki=10, Kd=5: all three roots of the crossover cubic are
  // positive, so the report must carry the smallest phase margin and
  // list every crossover.
  const Gains g = ipid_gains(0.1, 10.0, 5.0);
  const MarginReport r = margins_ipid(g);
  REQUIRE(r.gain_crossovers.size() == 3);
  const MarginReport oracle = margins_numeric({ControllerKind::iPID, g});
  REQUIRE(oracle.gain_crossovers.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(close_rel(r.gain_crossovers[i].omega, oracle.gain_crossovers[i].omega,
                    1e-8));
    CHECK(close_rel(r.gain_crossovers[i].phase_margin_deg,
                    oracle.gain_crossovers[i].phase_margin_deg, 1e-8));
  }
  CHECK(*r.phase_margin_deg ==
        std::min({r.gain_crossovers[0].phase_margin_deg,
                  r.gain_crossovers[1].phase_margin_deg,
                  r.gain_crossovers[2].phase_margin_deg}));
}

TEST_CASE("analytic and numeric margins agree across random gain sets") {
  std::mt19937 rng(2025);
  std::uniform_real_distribution<double> logu(-2.0, 2.0);
  const auto draw = [&] { return std::pow(10.0, logu(rng)); };
  for (int trial = 0; trial < 150; ++trial) {
    check_matches_numeric({ControllerKind::iP, ip_gains(draw())});
    check_matches_numeric({ControllerKind::iPI, ipi_gains(draw(), draw())});
    check_matches_numeric({ControllerKind::iPD, ipd_gains(draw(), draw())});
    check_matches_numeric({ControllerKind::iPID,
                           ipid_gains(draw(), draw(), draw())});
  }
}

TEST_CASE("Cardano root of the crossover cubic: positive, tiny residual") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> logu(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double kp = std::pow(10.0, logu(rng));
    const double ki = std::pow(10.0, logu(rng));
    const double kd = std::pow(10.0, logu(rng));
    const MarginReport r = margins_ipid(ipid_gains(kp, ki, kd));
    REQUIRE(r.omega_gain.has_value());
    const double x = *r.omega_gain * *r.omega_gain;
    CHECK(x > 0.0);
    CHECK(cubic_residual_scaled(-kd * kd, 2.0 * kd * ki - kp * kp, -ki * ki, x) <=
          1e-12);
  }
}

TEST_CASE("closed-loop polynomial stable iff the Routh condition holds") {
  // iPI: s^2 + Kp s + Ki has both roots in the left half plane for any
  // positive gains; iPID: s^3 + Kd s^2 + Kp s + Ki needs Kd Kp > Ki.
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> logu(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double kp = std::pow(10.0, logu(rng));
    const double ki = std::pow(10.0, logu(rng));
    const double kd = std::pow(10.0, logu(rng));

    const double disc = kp * kp - 4.0 * ki;
    double max_re_ipi;
    if (disc >= 0.0)
      max_re_ipi = (-kp + std::sqrt(disc)) / 2.0;
    else
      max_re_ipi = -kp / 2.0;
    CHECK(max_re_ipi < 0.0);

    if (std::abs(kd * kp - ki) <= 1e-6 * std::max(kd * kp, ki)) continue;
    const CubicRoots roots = solve_cubic(kd, kp, ki);
    double max_re = roots.roots[roots.count - 1];
    if (roots.count == 1) {
      // Deflate: remaining quadratic s^2 + (Kd + r) s + (Kp + r (Kd + r)).
      const double r0 = roots.roots[0];
      max_re = std::max(r0, -(kd + r0) / 2.0);
    }
    CHECK((max_re < 0.0) == (kd * kp > ki));
  }
}

TEST_CASE("numeric oracle on a pure integrator loop") {
  const MarginReport r = margins_numeric({ControllerKind::iP, ip_gains(1.0)});
  CHECK(*r.phase_margin_deg == doctest::Approx(90.0).epsilon(1e-9));
  CHECK(*r.omega_gain == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(!r.gain_margin.has_value());
}

TEST_CASE("numeric oracle: delayed iP at tau = pi/2 has zero phase margin") {
  OpenLoopTF tf{ControllerKind::iP, ip_gains(1.0), kPi / 2.0};
  const MarginReport r = margins_numeric(tf);
  CHECK(std::abs(*r.phase_margin_deg) <= 1e-6);
  // First phase crossover of the delayed integrator: GM = pi/(2 tau Kp).
  REQUIRE(r.gain_margin.has_value());
  CHECK(*r.gain_margin == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("numeric oracle: delayed iP gain margin is pi/(2 tau Kp)") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> logu(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double kp = std::pow(10.0, logu(rng));
    const double tau = std::pow(10.0, logu(rng));
    OpenLoopTF tf{ControllerKind::iP, ip_gains(kp), tau};
    const MarginReport r = margins_numeric(tf);
    REQUIRE(r.gain_margin.has_value());
    CHECK(*r.gain_margin ==
          doctest::Approx(kPi / (2.0 * tau * kp)).epsilon(1e-9));
  }
}

TEST_CASE("numeric oracle reports a missing crossover with an explanation") {
  SweepOptions opt;
  opt.omega_min = 100.0;
  opt.omega_max = 1000.0;
  const MarginReport r = margins_numeric({ControllerKind::iP, ip_gains(1.0)}, opt);
  CHECK(!r.omega_gain.has_value());
  CHECK(!r.phase_margin_deg.has_value());
  CHECK(!r.note.empty());
}

TEST_CASE("delay margin of the iP loop") {
  CHECK(delay_margin_ip(1.0) == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  CHECK(delay_margin_ip(1.0) == doctest::Approx(1.57).epsilon(5e-3));
  CHECK(delay_margin_ip(10.0) == doctest::Approx(0.157).epsilon(5e-3));
  CHECK(delay_margin_ip(kPi / 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(delay_margin_ip(0.0), ValidationError);
}

TEST_CASE("nyquist sweep of the pure integrator stays on the imaginary axis") {
  const auto rows = nyquist_sample({ControllerKind::iP, ip_gains(1.0)}, 0.1, 10.0, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].omega == doctest::Approx(0.1));
  CHECK(rows[2].omega == doctest::Approx(10.0));
  for (const NyquistRow& row : rows) {
    CHECK(row.re == 0.0);
    CHECK(row.im < 0.0);
    CHECK(row.phase_deg == doctest::Approx(-90.0).epsilon(1e-12));
  }
  CHECK(rows[0].omega < rows[1].omega);
  CHECK(rows[1].omega < rows[2].omega);
}

TEST_CASE("nyquist row at the iPI crossover reads 0 dB") {
  const MarginReport r = margins_ipi(ipi_gains(1.0, 1.0));
  const auto rows = nyquist_sample({ControllerKind::iPI, ipi_gains(1.0, 1.0)},
                                   *r.omega_gain, 10.0, 5);
  CHECK(std::abs(rows[0].gain_db) <= 1e-9);
}

TEST_CASE("nyquist phase of a delayed integrator follows the delay law") {
  const double tau = 0.7;
  const auto rows =
      nyquist_sample({ControllerKind::iP, ip_gains(2.0), tau}, 0.01, 100.0, 40);
  for (const NyquistRow& row : rows)
    CHECK(row.phase_deg ==
          doctest::Approx(-90.0 - row.omega * tau * 180.0 / kPi).epsilon(1e-12));
}

TEST_CASE("nyquist sweep argument validation") {
  CHECK_THROWS_AS(nyquist_sample({ControllerKind::iP, ip_gains(1.0)}, 0.0, 1.0, 10),
                  ValidationError);
  CHECK_THROWS_AS(nyquist_sample({ControllerKind::iP, ip_gains(1.0)}, 2.0, 1.0, 10),
                  ValidationError);
  CHECK_THROWS_AS(nyquist_sample({ControllerKind::iP, ip_gains(1.0)}, 0.1, 1.0, 1),
                  ValidationError);
}

TEST_CASE("nyquist csv emission") {
  const auto rows = nyquist_sample({ControllerKind::iP, ip_gains(1.0)}, 0.1, 10.0, 4);
  const std::string path = "test_nyquist_out.csv";
  write_nyquist_csv(rows, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "omega,re,im,gain_db,phase_deg");
  int data_lines = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++data_lines;
  CHECK(data_lines == 4);
  std::remove(path.c_str());
}

TEST_SUITE_END();
