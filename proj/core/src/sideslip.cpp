#include "hoverwing/sideslip.hpp"

#include <algorithm>
#include <cmath>

namespace hoverwing {

namespace {
constexpr double kPitchBackMax = 25.0 * M_PI / 180.0;
constexpr double kAirspeedFloor = 10.0;
}  // namespace

double turn_bank(double phi_ref, double theta_ref) {
  if (theta_ref > 0.0 && std::abs(phi_ref) < theta_ref) {
    return std::copysign(theta_ref, phi_ref);
  }
  return phi_ref;
}

double heading_rate_ref(double phi_ref, double theta_ref, double airspeed,
                        double beta, double k_beta, double gravity) {
  const double v_l = std::max(airspeed, kAirspeedFloor);
  const double phi_t = turn_bank(phi_ref, theta_ref);
  return gravity * std::tan(phi_t) / v_l + k_beta * beta;
}

double clamp_pitch_ref(double theta_ref) {
  return std::min(theta_ref, kPitchBackMax);
}

HeadingReference::HeadingReference(const HeadingRefParams& params)
    : params_(params),
      fy_filter_(params.fy_cutoff_hz, params.sample_hz) {}

void HeadingReference::reset(double psi0, double f_y0) {
  psi_ref_ = wrap_pi(psi0);
  psi_dot_ref_ = 0.0;
  fy_filter_.reset(f_y0);
  f_y_f_ = f_y0;
  beta_ = estimate_beta(f_y0, params_.coeffs);
}

void HeadingReference::hold(double f_y) {
  if (auto y = fy_filter_.step(f_y)) f_y_f_ = *y;
  beta_ = estimate_beta(f_y_f_, params_.coeffs);
  psi_dot_ref_ = 0.0;
}

double HeadingReference::step(double f_y, double phi_ref, double theta_ref,
                              double airspeed) {
  if (auto y = fy_filter_.step(f_y)) f_y_f_ = *y;
  beta_ = estimate_beta(f_y_f_, params_.coeffs);
  psi_dot_ref_ = heading_rate_ref(phi_ref, theta_ref, airspeed, beta_,
                                  params_.k_beta, params_.gravity);
  psi_ref_ = wrap_pi(psi_ref_ + psi_dot_ref_ / params_.sample_hz);
  return psi_ref_;
}

}  // namespace hoverwing
