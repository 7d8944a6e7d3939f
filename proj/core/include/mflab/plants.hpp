#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "mflab/types.hpp"

namespace mflab {

/// Gaussian source built from mt19937_64 bits and the Box-Muller
/// transform rather than std::normal_distribution, so identical seeds
/// give identical draws under any standard library.
class NoiseSource {
 public:
  NoiseSource(std::uint64_t seed, double std_dev);

  /// One draw from N(0, std_dev^2); exactly 0 when std_dev == 0.
  double sample();

 private:
  std::mt19937_64 rng_;
  double std_dev_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Zero-order-hold transport delay quantized to whole samples; emits 0
/// until the first pushed value has aged through the line.
class DelayLine {
 public:
  DelayLine(double delay, double sample_period);

  /// Pushes the newest command and returns the one delayed by the line.
  double push(double u);

  int length() const { return static_cast<int>(buffer_.size()); }

 private:
  std::vector<double> buffer_;
  int pos_ = 0;
};

// Right-hand sides of the two plant families, exposed for tests that
// integrate them with inputs other than zero-order hold.
//
// Nonlinear: x1' = x2, x2' = -3 x1 - 4 x2 + v with v = u^3 and output
// y = 2 x1 + x2, which realizes y'' + 4 y' + 3 y = v' + 2 v without ever
// differentiating the input. Linear: 2 y' - 3 y = u.
std::array<double, 2> nonlinear_rhs(const std::array<double, 2>& x, double v);
inline double nonlinear_output(const std::array<double, 2>& x) {
  return 2.0 * x[0] + x[1];
}
inline double linear_rhs(double y, double u) { return (3.0 * y + u) / 2.0; }

struct PlantConfig {
  PlantId id = PlantId::Linear;
  double sample_period = 0.01;
  double delay = 0.0;      // rounded to whole samples
  double noise_std = 0.0;  // standard deviation, not variance
  std::uint64_t seed = 0;
  double x1_0 = 0.0;
  double x2_0 = 0.0;
};

/// Fixed-step simulation of one plant: classical RK4 with the input held
/// constant over each sample, an input delay line, and seeded output
/// noise. Divergence (any state beyond 1e12) latches instead of crashing.
class Plant {
 public:
  explicit Plant(const PlantConfig& config);

  /// Clean output at the current state.
  double output() const;
  /// Clean output plus one noise draw.
  double measure();
  /// dy/dt at the current state with u_active applied.
  double output_rate(double u_active) const;
  /// d2y/dt2 at the current state with u_active held (zero-order hold).
  double output_accel(double u_active) const;

  // Pushes the command through the delay line, advances one RK4 step
  // with the delayed value held constant, and returns that value. After
  // divergence the state freezes and the command is echoed back.
  double step(double u_command, double sample_period);

  bool diverged() const { return diverged_; }
  double time() const { return time_; }
  /// Effective (post-delay) input over the last integrated interval.
  double applied_input() const { return applied_input_; }

 private:
  std::array<double, 2> derivatives(const std::array<double, 2>& x,
                                    double u) const;

  PlantConfig config_;
  std::array<double, 2> state_{};
  DelayLine delay_line_;
  NoiseSource noise_;
  double time_ = 0.0;
  double applied_input_ = 0.0;
  bool diverged_ = false;
};

}  // namespace mflab
