#pragma once

#include <optional>
#include <vector>

#include "mflab/types.hpp"

namespace mflab {

/// Ring buffer of the most recent N equally spaced (t, y, u) samples
/// feeding the F estimator. Oldest sample first in all accessors.
class SampledWindow {
 public:
  // capacity >= 3 (the quadrature needs at least two panels); the stored
  // samples span (capacity - 1) * sample_period seconds.
  SampledWindow(int capacity, double sample_period);

  /// Window sized so the stored samples span requested_span seconds,
  /// clamped below at two panels: N = max(3, round(span/Te) + 1).
  static SampledWindow for_span(double requested_span, double sample_period);

  void push(double t, double y, double u);
  void clear();

  bool full() const { return size_ == capacity_; }
  int size() const { return size_; }
  int capacity() const { return capacity_; }
  double sample_period() const { return sample_period_; }
  /// Time span actually covered by a full window: (N - 1) * Te.
  double span() const { return sample_period_ * (capacity_ - 1); }

  double t_at(int i) const;  // i = 0 is the oldest sample
  double y_at(int i) const;
  double u_at(int i) const;

 private:
  int index(int i) const { return (head_ + i) % capacity_; }

  int capacity_;
  double sample_period_;
  std::vector<double> t_, y_, u_;
  int head_ = 0;  // slot of the oldest sample
  int size_ = 0;
};

// Realtime estimate of F over a full window:
//
//   F_est = -(6/tw^3) * integral_0^tw [ (tw - 2s) y(t - tw + s)
//                                       + alpha s (tw - s) u(t - tw + s) ] ds
//
// with s the window-local time and tw the window span. The sampled
// signals are treated as piecewise linear between the stored points and
// the polynomial weights are integrated exactly on each panel, so the
// estimate reproduces F without quadrature error whenever y is affine in
// t and u is constant, and the (tw - 2s) weight annihilates constant
// offsets of y exactly. Returns nullopt while the window is filling.
std::optional<double> estimate_f(const SampledWindow& window, double alpha);

/// Exact F of the order-1 ultra-local model y' = F + alpha u.
inline double ultra_local_f(double y_dot, double u, double alpha) {
  return y_dot - alpha * u;
}

}  // namespace mflab
