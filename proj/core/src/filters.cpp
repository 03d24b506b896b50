#include "hoverwing/filters.hpp"

#include <numbers>

namespace hoverwing {

namespace {

Biquad make_lowpass2(double cutoff_hz, double sample_hz) {
  // Q = 1/sqrt(2) for a maximally flat second-order section.
  const double K = std::tan(std::numbers::pi * cutoff_hz / sample_hz);
  const double k2 = K * K;
  const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * K + k2);
  Biquad bq;
  bq.b0 = k2 * norm;
  bq.b1 = 2.0 * bq.b0;
  bq.b2 = bq.b0;
  bq.a1 = 2.0 * (k2 - 1.0) * norm;
  bq.a2 = (1.0 - std::numbers::sqrt2 * K + k2) * norm;
  return bq;
}

Biquad make_highpass2(double cutoff_hz, double sample_hz, double q) {
  const double K = std::tan(std::numbers::pi * cutoff_hz / sample_hz);
  const double k2 = K * K;
  const double norm = 1.0 / (1.0 + K / q + k2);
  Biquad bq;
  bq.b0 = norm;
  bq.b1 = -2.0 * norm;
  bq.b2 = norm;
  bq.a1 = 2.0 * (k2 - 1.0) * norm;
  bq.a2 = (1.0 - K / q + k2) * norm;
  return bq;
}

}  // namespace

Butter2Lowpass::Butter2Lowpass(double cutoff_hz, double sample_hz)
    : cutoff_hz_(cutoff_hz), sample_hz_(sample_hz) {
  bq_ = make_lowpass2(cutoff_hz, sample_hz);
}

std::optional<double> Butter2Lowpass::step(double x) {
  if (!std::isfinite(x)) return std::nullopt;
  return bq_.step(x);
}

Butter4Highpass::Butter4Highpass(double cutoff_hz, double sample_hz) {
  // Section Q values of the 4th-order Butterworth polynomial.
  sections_[0] = make_highpass2(cutoff_hz, sample_hz, 0.54119610014620);
  sections_[1] = make_highpass2(cutoff_hz, sample_hz, 1.30656296487638);
}

void Butter4Highpass::reset(double x0) {
  // A held input settles to zero output; warm start each section with
  // its own steady state so the cascade starts there immediately.
  sections_[0].warm_start(x0);
  sections_[1].warm_start(0.0);
}

std::optional<double> Butter4Highpass::step(double x) {
  if (!std::isfinite(x)) return std::nullopt;
  double y = sections_[0].step(x);
  y = sections_[1].step(y);
  return y;
}

}  // namespace hoverwing
