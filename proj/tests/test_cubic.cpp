#include <doctest.h>

#include <cmath>
#include <random>

#include "mflab/cubic.hpp"

using namespace mflab;

TEST_SUITE_BEGIN("cubic");

TEST_CASE("three distinct real roots") {
  // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
  const CubicRoots r = solve_cubic(-6.0, 11.0, -6.0);
  REQUIRE(r.count == 3);
  CHECK(r.roots[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.roots[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.roots[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("single real root") {
  // x^3 + x + 1 has one real root near -0.6823278
  const CubicRoots r = solve_cubic(0.0, 1.0, 1.0);
  REQUIRE(r.count == 1);
  CHECK(r.roots[0] == doctest::Approx(-0.682327803828019).epsilon(1e-12));
}

TEST_CASE("triple root") {
  // (x-2)^3 = x^3 - 6x^2 + 12x - 8
  const CubicRoots r = solve_cubic(-6.0, 12.0, -8.0);
  REQUIRE(r.count == 1);
  CHECK(r.roots[0] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("double root") {
  // (x-1)^2 (x+2) = x^3 - 3x + 2
  const CubicRoots r = solve_cubic(0.0, -3.0, 2.0);
  REQUIRE(r.count >= 2);
  CHECK(r.roots[0] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(r.roots[r.count - 1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("random coefficients: residual at the rounding floor") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coeff(-100.0, 100.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double a = coeff(rng), b = coeff(rng), c = coeff(rng);
    const CubicRoots r = solve_cubic(a, b, c);
    REQUIRE(r.count >= 1);
    for (int i = 0; i < r.count; ++i) {
      CHECK(cubic_residual_scaled(a, b, c, r.roots[i]) <= 1e-12);
      if (i > 0) CHECK(r.roots[i] >= r.roots[i - 1]);
    }
  }
}

TEST_CASE("reconstructed from well separated roots") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> root(-20.0, 20.0);
  int accepted = 0;
  while (accepted < 500) {
    double r1 = root(rng), r2 = root(rng), r3 = root(rng);
    if (std::abs(r1 - r2) < 0.1 || std::abs(r1 - r3) < 0.1 ||
        std::abs(r2 - r3) < 0.1)
      continue;
    ++accepted;
    const double a = -(r1 + r2 + r3);
    const double b = r1 * r2 + r1 * r3 + r2 * r3;
    const double c = -r1 * r2 * r3;
    const CubicRoots got = solve_cubic(a, b, c);
    REQUIRE(got.count == 3);
    double expected[3] = {r1, r2, r3};
    std::sort(expected, expected + 3);
    for (int i = 0; i < 3; ++i)
      CHECK(got.roots[i] == doctest::Approx(expected[i]).epsilon(1e-9));
  }
}

TEST_SUITE_END();
