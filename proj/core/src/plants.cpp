#include "mflab/plants.hpp"

#include <cmath>

namespace mflab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kDivergenceLimit = 1e12;
}  // namespace

NoiseSource::NoiseSource(std::uint64_t seed, double std_dev)
    : rng_(seed), std_dev_(std_dev) {
  if (std_dev < 0.0) throw ValidationError("noise_std: must be >= 0");
}

double NoiseSource::sample() {
  if (std_dev_ == 0.0) return 0.0;
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // 53-bit uniforms; u1 kept away from 0 for the log.
  const double u1 = 1.0 - (rng_() >> 11) * 0x1.0p-53;
  const double u2 = (rng_() >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1)) * std_dev_;
  cached_ = radius * std::sin(kTwoPi * u2);
  has_cached_ = true;
  return radius * std::cos(kTwoPi * u2);
}

DelayLine::DelayLine(double delay, double sample_period) {
  if (delay < 0.0) throw ValidationError("delay: must be >= 0");
  if (!(sample_period > 0.0))
    throw ValidationError("sample_period: must be > 0");
  const auto length = static_cast<int>(std::llround(delay / sample_period));
  buffer_.assign(length, 0.0);
}

double DelayLine::push(double u) {
  if (buffer_.empty()) return u;
  const double out = buffer_[pos_];
  buffer_[pos_] = u;
  pos_ = (pos_ + 1) % static_cast<int>(buffer_.size());
  return out;
}

std::array<double, 2> nonlinear_rhs(const std::array<double, 2>& x, double v) {
  return {x[1], -3.0 * x[0] - 4.0 * x[1] + v};
}

Plant::Plant(const PlantConfig& config)
    : config_(config),
      state_{config.x1_0, config.x2_0},
      delay_line_(config.delay, config.sample_period),
      noise_(config.seed, config.noise_std) {}

std::array<double, 2> Plant::derivatives(const std::array<double, 2>& x,
                                         double u) const {
  if (config_.id == PlantId::Nonlinear) return nonlinear_rhs(x, u * u * u);
  return {linear_rhs(x[0], u), 0.0};
}

double Plant::output() const {
  if (config_.id == PlantId::Nonlinear) return nonlinear_output(state_);
  return state_[0];
}

double Plant::measure() { return output() + noise_.sample(); }

double Plant::output_rate(double u_active) const {
  const auto dx = derivatives(state_, u_active);
  if (config_.id == PlantId::Nonlinear) return 2.0 * dx[0] + dx[1];
  return dx[0];
}

double Plant::output_accel(double u_active) const {
  if (config_.id == PlantId::Nonlinear) {
    const double v = u_active * u_active * u_active;
    return 6.0 * state_[0] + 5.0 * state_[1] - 2.0 * v;
  }
  return 1.5 * output_rate(u_active);
}

double Plant::step(double u_command, double sample_period) {
  if (!(sample_period > 0.0))
    throw ValidationError("sample_period: must be > 0");
  if (diverged_) return u_command;

  const double u = delay_line_.push(u_command);
  applied_input_ = u;

  const double h = sample_period;
  const auto k1 = derivatives(state_, u);
  const auto at = [&](const std::array<double, 2>& k, double scale) {
    return std::array<double, 2>{state_[0] + scale * k[0],
                                 state_[1] + scale * k[1]};
  };
  const auto k2 = derivatives(at(k1, h / 2.0), u);
  const auto k3 = derivatives(at(k2, h / 2.0), u);
  const auto k4 = derivatives(at(k3, h), u);
  for (int i = 0; i < 2; ++i)
    state_[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  time_ += h;

  if (!std::isfinite(state_[0]) || !std::isfinite(state_[1]) ||
      std::abs(state_[0]) > kDivergenceLimit ||
      std::abs(state_[1]) > kDivergenceLimit)
    diverged_ = true;
  return u;
}

}  // namespace mflab
