#pragma once

#include <array>

namespace mflab {

/// Real roots of x^3 + a*x^2 + b*x + c = 0, ascending, without
/// multiplicity. `count` is 1, 2 or 3.
struct CubicRoots {
  std::array<double, 3> roots{};
  int count = 0;
};

// Cardano's method on the depressed cubic; the casus irreducibilis
// (three real roots) goes through the trigonometric form. Each root is
// polished with a couple of Newton steps so the residual sits at the
// rounding floor of the polynomial evaluation.
CubicRoots solve_cubic(double a, double b, double c);

/// |p(x)| / max(1, |x|^3 + |a|x^2 + |b||x| + |c|): residual scaled by the
/// evaluation magnitude, so a well-polished root scores near machine eps.
double cubic_residual_scaled(double a, double b, double c, double x);

}  // namespace mflab
