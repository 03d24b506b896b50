#pragma once

#include "hoverwing/filters.hpp"
#include "hoverwing/frames.hpp"

namespace hoverwing {

/// Sideslip from lateral specific force alone, beta = c2*f_y + b2. No
/// airspeed in the map, so the estimate stays finite through hover and
/// pitot dropouts.
struct SideslipCoeffs {
  double c2{0.0};  // rad per m/s^2
  double b2{0.0};  // rad
};

inline double estimate_beta(double f_y, const SideslipCoeffs& c) {
  return c.c2 * f_y + c.b2;
}

/// Bank angle used for the coordinated-turn feedforward. While pitched
/// backward the roll axis loses authority near the vertical, so the
/// feedforward bank is held at least as large as the pitch-back angle.
double turn_bank(double phi_ref, double theta_ref);

/// Coordinated-turn heading rate plus sideslip feedback. The airspeed in
/// the denominator is floored at 10 m/s so the feedforward stays bounded
/// at low speed.
double heading_rate_ref(double phi_ref, double theta_ref, double airspeed,
                        double beta, double k_beta, double gravity = 9.81);

/// Backward pitch is limited; forward pitch (negative) is not clamped here.
double clamp_pitch_ref(double theta_ref);

struct HeadingRefParams {
  SideslipCoeffs coeffs;
  double k_beta{2.0};        // 1/s, sideslip feedback gain
  double fy_cutoff_hz{5.0};  // lateral force filter
  double sample_hz{500.0};
  double gravity{9.81};
};

/// Owns the filtered lateral force, the sideslip estimate, and the
/// integrated heading reference.
class HeadingReference {
 public:
  explicit HeadingReference(const HeadingRefParams& params);

  void reset(double psi0, double f_y0 = 0.0);

  /// One control tick: filter f_y, update beta, integrate psi_ref.
  /// Returns the new heading reference in (-pi, pi].
  double step(double f_y, double phi_ref, double theta_ref, double airspeed);

  /// Keep the lateral-force filter running without integrating, for
  /// plan-commanded headings (hover legs).
  void hold(double f_y);

  double psi_ref() const { return psi_ref_; }
  double psi_dot_ref() const { return psi_dot_ref_; }
  double beta() const { return beta_; }
  double f_y_filtered() const { return f_y_f_; }

  /// Override the integrated reference (e.g. align with current heading
  /// when switching guidance legs).
  void set_psi_ref(double psi) { psi_ref_ = wrap_pi(psi); }

 private:
  HeadingRefParams params_;
  Butter2Lowpass fy_filter_;
  double psi_ref_{0.0};
  double psi_dot_ref_{0.0};
  double beta_{0.0};
  double f_y_f_{0.0};
};

}  // namespace hoverwing
