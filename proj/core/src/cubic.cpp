#include "mflab/cubic.hpp"

#include <algorithm>
#include <cmath>

namespace mflab {

namespace {

double eval(double a, double b, double c, double x) {
  return ((x + a) * x + b) * x + c;
}

double eval_deriv(double a, double b, double x) {
  return (3.0 * x + 2.0 * a) * x + b;
}

// Evaluation-magnitude scale at x, the rounding floor of eval().
double residual_scale(double a, double b, double c, double x) {
  const double ax = std::abs(x);
  return std::max(1.0, ax * ax * ax + std::abs(a) * ax * ax +
                           std::abs(b) * ax + std::abs(c));
}

// Bisection on a sign change followed by Newton steps. lo/hi need not be
// ordered; f(lo) and f(hi) must straddle zero.
double refine(double a, double b, double c, double lo, double hi) {
  double f_lo = eval(a, b, c, lo);
  if (f_lo == 0.0) return lo;
  if (f_lo > 0.0) {
    std::swap(lo, hi);
    f_lo = -f_lo;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double f_mid = eval(a, b, c, mid);
    if (f_mid == 0.0) return mid;
    if (f_mid < 0.0)
      lo = mid;
    else
      hi = mid;
    if (std::abs(hi - lo) <= 1e-14 * std::max(std::abs(lo), std::abs(hi)))
      break;
  }
  double x = 0.5 * (lo + hi);
  const double lower = std::min(lo, hi);
  const double upper = std::max(lo, hi);
  for (int i = 0; i < 3; ++i) {
    const double df = eval_deriv(a, b, x);
    if (df == 0.0) break;
    const double next = x - eval(a, b, c, x) / df;
    if (!std::isfinite(next) || next < lower || next > upper) break;
    x = next;
  }
  return x;
}

}  // namespace

// Classifies by the critical points of the cubic instead of the
// closed-form discriminant: the depressed-cubic discriminant cancels
// catastrophically once the roots spread over more than ~5 decades
// (routine here, where the crossover cubic mixes gains across 4 decades)
// and then miscounts the real roots. Bracketing each root between
// critical points and a Cauchy bound stays exact at any scale.
CubicRoots solve_cubic(double a, double b, double c) {
  CubicRoots out;
  const double bound =
      1.0 + std::max({std::abs(a), std::abs(b), std::abs(c)});

  const double crit_disc = a * a - 3.0 * b;  // p'(x)/3 = x^2 + (2a/3)x + b/3
  if (crit_disc <= 0.0) {
    // Monotone (or inflection-tangent): exactly one real root. A triple
    // root sits at the inflection and is sharper algebraically than any
    // search on the expanded polynomial can make it.
    const double x_infl = -a / 3.0;
    if (crit_disc >= -4e-16 * std::max(a * a, 3.0 * std::abs(b)) &&
        std::abs(eval(a, b, c, x_infl)) <=
            4e-16 * residual_scale(a, b, c, x_infl))
      out.roots[0] = x_infl;
    else
      out.roots[0] = refine(a, b, c, -bound, bound);
    out.count = 1;
    return out;
  }

  // Local max at x_lo, local min at x_hi; computed cancellation-free.
  const double s = std::sqrt(crit_disc);
  const double x_lo = (a > 0.0) ? (-a - s) / 3.0 : b / (-a + s);
  const double x_hi = (a > 0.0) ? b / (-a - s) : (-a + s) / 3.0;
  const double p_max = eval(a, b, c, x_lo);
  const double p_min = eval(a, b, c, x_hi);
  const double tol_max = 4e-16 * residual_scale(a, b, c, x_lo);
  const double tol_min = 4e-16 * residual_scale(a, b, c, x_hi);

  if (std::abs(p_max) <= tol_max && std::abs(p_min) <= tol_min) {
    out.roots[0] = -a / 3.0;  // triple root at the inflection
    out.count = 1;
    return out;
  }
  if (std::abs(p_max) <= tol_max) {
    out.roots[0] = x_lo;  // double root at the local max
    out.roots[1] = refine(a, b, c, x_hi, bound);
    out.count = 2;
    return out;
  }
  if (std::abs(p_min) <= tol_min) {
    out.roots[0] = refine(a, b, c, -bound, x_lo);
    out.roots[1] = x_hi;  // double root at the local min
    out.count = 2;
    return out;
  }
  if (p_max < 0.0) {
    out.roots[0] = refine(a, b, c, x_hi, bound);  // both extrema below zero
    out.count = 1;
    return out;
  }
  if (p_min > 0.0) {
    out.roots[0] = refine(a, b, c, -bound, x_lo);  // both extrema above zero
    out.count = 1;
    return out;
  }

  out.roots[0] = refine(a, b, c, -bound, x_lo);
  out.roots[1] = refine(a, b, c, x_lo, x_hi);
  out.roots[2] = refine(a, b, c, x_hi, bound);
  out.count = 3;
  std::sort(out.roots.begin(), out.roots.begin() + 3);
  return out;
}

double cubic_residual_scaled(double a, double b, double c, double x) {
  return std::abs(eval(a, b, c, x)) / residual_scale(a, b, c, x);
}

}  // namespace mflab
