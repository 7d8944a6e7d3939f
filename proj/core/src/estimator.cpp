#include "mflab/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace mflab {

SampledWindow::SampledWindow(int capacity, double sample_period)
    : capacity_(capacity), sample_period_(sample_period) {
  if (capacity < 3)
    throw ValidationError("window capacity: need at least 3 samples");
  if (!(sample_period > 0.0))
    throw ValidationError("sample_period: must be > 0");
  t_.resize(capacity_);
  y_.resize(capacity_);
  u_.resize(capacity_);
}

SampledWindow SampledWindow::for_span(double requested_span,
                                      double sample_period) {
  if (!(sample_period > 0.0))
    throw ValidationError("sample_period: must be > 0");
  if (!(requested_span > 0.0))
    throw ValidationError("estimator window: must be > 0");
  const int n =
      std::max(3, static_cast<int>(std::llround(requested_span / sample_period)) + 1);
  return SampledWindow(n, sample_period);
}

void SampledWindow::push(double t, double y, double u) {
  if (size_ > 0) {
    const double previous = t_at(size_ - 1);
    if (std::abs(t - previous - sample_period_) > 1e-6 * sample_period_)
      throw ValidationError("window samples must be spaced by the sample period");
  }
  if (size_ < capacity_) {
    const int slot = index(size_);
    t_[slot] = t;
    y_[slot] = y;
    u_[slot] = u;
    ++size_;
  } else {
    t_[head_] = t;
    y_[head_] = y;
    u_[head_] = u;
    head_ = (head_ + 1) % capacity_;
  }
}

void SampledWindow::clear() {
  head_ = 0;
  size_ = 0;
}

double SampledWindow::t_at(int i) const { return t_[index(i)]; }
double SampledWindow::y_at(int i) const { return y_[index(i)]; }
double SampledWindow::u_at(int i) const { return u_[index(i)]; }

std::optional<double> estimate_f(const SampledWindow& window, double alpha) {
  if (alpha == 0.0) throw ValidationError("alpha: must be nonzero");
  if (!window.full()) return std::nullopt;

  const int n = window.capacity();
  const double h = window.sample_period();
  const double span = window.span();
  const double half_span = span / 2.0;

  // Per-sample quadrature weights, written around the window midpoint
  // (d = s - tw/2) so mirrored samples get exactly opposite (y weights)
  // or exactly equal (u weights) values in floating point.
  //   y weight density: tw - 2s = -2 d
  //   u weight density: s (tw - s) = (tw/2)^2 - d^2
  const double mid = (n - 1) / 2.0;
  const auto delta = [&](int k) { return h * (k - mid); };

  const auto weight_y = [&](int k) {
    if (k == 0) return -h * (delta(0) + h / 3.0);
    if (k == n - 1) return -h * (delta(n - 1) - h / 3.0);
    return -2.0 * h * delta(k);
  };
  const auto weight_u = [&](int k) {
    if (k == 0 || k == n - 1)
      return half_span * h * h / 3.0 - h * h * h / 12.0;
    const double d = delta(k);
    return h * (half_span * half_span - d * d - h * h / 6.0);
  };

  // Sum mirrored pairs together: for constant y the paired y terms
  // cancel exactly, which is what makes the offset annihilation bit
  // clean rather than merely small.
  double acc = 0.0;
  for (int k = 0; k < n / 2; ++k) {
    const int j = n - 1 - k;
    acc += weight_y(k) * window.y_at(k) + weight_y(j) * window.y_at(j);
    acc += alpha * (weight_u(k) * window.u_at(k) + weight_u(j) * window.u_at(j));
  }
  if (n % 2 == 1) {
    const int k = n / 2;
    acc += weight_y(k) * window.y_at(k) + alpha * weight_u(k) * window.u_at(k);
  }

  return -6.0 / (span * span * span) * acc;
}

}  // namespace mflab
