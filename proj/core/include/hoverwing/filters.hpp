#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "hoverwing/frames.hpp"

namespace hoverwing {

/// One biquad section, transposed direct form II.
struct Biquad {
  double b0{1.0}, b1{0.0}, b2{0.0};
  double a1{0.0}, a2{0.0};
  double s1{0.0}, s2{0.0};

  double step(double x) {
    const double y = b0 * x + s1;
    s1 = b1 * x - a1 * y + s2;
    s2 = b2 * x - a2 * y;
    return y;
  }

  /// Preload the delay line with the steady-state response to a constant
  /// input x0, so the filter starts settled instead of ringing.
  void warm_start(double x0) {
    const double g = (b0 + b1 + b2) / (1.0 + a1 + a2);
    const double y = g * x0;
    s2 = b2 * x0 - a2 * y;
    s1 = b1 * x0 - a1 * y + s2;
  }
};

/// Second-order Butterworth low-pass. Coefficients from the bilinear
/// transform with corner pre-warping; DC gain is exactly one.
class Butter2Lowpass {
 public:
  Butter2Lowpass() = default;
  Butter2Lowpass(double cutoff_hz, double sample_hz);

  void reset(double x0 = 0.0) { bq_.warm_start(x0); }

  /// Returns nullopt on a non-finite input, leaving the state untouched.
  std::optional<double> step(double x);

  double cutoff_hz() const { return cutoff_hz_; }
  double sample_hz() const { return sample_hz_; }

 private:
  Biquad bq_;
  double cutoff_hz_{5.0};
  double sample_hz_{500.0};
};

/// Fourth-order Butterworth high-pass, two cascaded biquads.
class Butter4Highpass {
 public:
  Butter4Highpass() = default;
  Butter4Highpass(double cutoff_hz, double sample_hz);

  /// Steady state for a held input is zero output.
  void reset(double x0 = 0.0);

  std::optional<double> step(double x);

 private:
  std::array<Biquad, 2> sections_;
};

/// Three identical low-pass channels, used for vector signals that must
/// stay synchronized (gyro, NED acceleration).
class Lowpass3 {
 public:
  Lowpass3() = default;
  Lowpass3(double cutoff_hz, double sample_hz) {
    for (auto& c : ch_) c = Butter2Lowpass(cutoff_hz, sample_hz);
  }
  void reset(const Vec3& x0) {
    for (int i = 0; i < 3; ++i) ch_[i].reset(x0(i));
  }
  std::optional<Vec3> step(const Vec3& x) {
    Vec3 y;
    for (int i = 0; i < 3; ++i) {
      auto r = ch_[i].step(x(i));
      if (!r) return std::nullopt;
      y(i) = *r;
    }
    return y;
  }

 private:
  std::array<Butter2Lowpass, 3> ch_;
};

/// First-order actuator lag u(k+1) = u(k) + a*(u_c - u(k)), optionally
/// rate limited. The same model serves the controller's actuator-state
/// estimate and the plant's servo dynamics.
struct ActuatorModel {
  double pole{0.1};                                       // a in u += a*(u_c - u)
  double rate_limit{std::numeric_limits<double>::infinity()};  // command units/s
  double sample_hz{500.0};
  double state{0.0};

  double step(double u_c) {
    double du = pole * (u_c - state);
    const double du_max = rate_limit / sample_hz;
    if (du > du_max) du = du_max;
    if (du < -du_max) du = -du_max;
    state += du;
    return state;
  }
  void reset(double u0) { state = u0; }
};

}  // namespace hoverwing
