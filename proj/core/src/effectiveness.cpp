#include "hoverwing/effectiveness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hoverwing {

double pitch_ramp(double theta, double start_deg, double end_deg) {
  const double deg = theta * 180.0 / std::numbers::pi;
  if (deg >= start_deg) return 0.0;
  if (deg <= end_deg) return 1.0;
  return (deg - start_deg) / (end_deg - start_deg);
}

double flap_pitch_eff(double theta, double V, bool V_valid,
                      const InnerScheduleParams& p) {
  if (V_valid && V >= p.airspeed_measurable) {
    return p.pitch_a + p.pitch_b * V * V;
  }
  const double r = pitch_ramp(theta, p.ramp_start_deg, p.ramp_end_deg);
  return p.pitch_hover * (1.0 - r) + p.pitch_fwd * r;
}

double flap_yaw_eff(double theta, double V, bool V_valid,
                    const InnerScheduleParams& p) {
  if (V_valid && V >= p.airspeed_measurable) {
    return p.yaw_a + p.yaw_b * V * V;
  }
  const double r = pitch_ramp(theta, p.ramp_start_deg, p.ramp_end_deg);
  return p.yaw_hover * (1.0 - r) + p.yaw_fwd * r;
}

void motor_roll_eff(double u_f3, double u_f4, const InnerScheduleParams& p,
                    double& g13, double& g14) {
  g13 = -u_f3 * p.motor_roll_k;
  g14 = u_f4 * p.motor_roll_k;
}

double thrust_pitch_eff(double u_f1, double u_f2,
                        const InnerScheduleParams& p) {
  if (u_f1 > p.flap_gate && u_f2 < -p.flap_gate) return -p.thrust_pitch;
  if (u_f1 < -p.flap_gate && u_f2 > p.flap_gate) return p.thrust_pitch;
  return 0.0;
}

Mat4 build_inner_G(const ScheduleInputs& s, const InnerScheduleParams& p) {
  const double g21 = flap_pitch_eff(s.theta, s.airspeed, s.airspeed_valid, p);
  const double g31 = flap_yaw_eff(s.theta, s.airspeed, s.airspeed_valid, p);
  double g13 = 0.0, g14 = 0.0;
  motor_roll_eff(s.u_f(kMotorLeft), s.u_f(kMotorRight), p, g13, g14);
  // The gate value is per percent thrust; motor columns are per command unit.
  const double g23 = thrust_pitch_eff(s.u_f(kFlapLeft), s.u_f(kFlapRight), p) /
                     p.units_per_pct_thrust;

  Mat4 G;
  G << 0.0, 0.0, g13, g14,
      g21, -g21, g23, g23,
      g31, g31, 0.0, 0.0,
      0.0, 0.0, p.motor_thrust, p.motor_thrust;
  return G;
}

double thrust_floor(double V, bool V_valid, const InnerScheduleParams& p) {
  const bool low_flow = !(V_valid && V >= p.floor_speed);
  const double frac = low_flow ? p.floor_low_frac : p.floor_high_frac;
  return frac * kMotorCmdMax;
}

namespace {
double clamp_trim_theta(double theta) {
  return std::clamp(theta, -0.5 * std::numbers::pi, 0.0);
}
}  // namespace

double lift_trim(double theta, const OuterScheduleParams& p) {
  const double th = clamp_trim_theta(theta);
  return -p.gravity * std::sin(-th) * p.mass;
}

double thrust_trim(double theta, const OuterScheduleParams& p) {
  const double th = clamp_trim_theta(theta);
  return -p.gravity * std::cos(th) * p.mass;
}

double lift_slope(double theta, double V, const OuterScheduleParams& p) {
  if (V < p.slope_speed_switch) {
    const double r = pitch_ramp(theta, p.ramp_start_deg, p.ramp_end_deg);
    return p.slope_hover * r * p.mass;
  }
  return p.slope_gain * (V - p.slope_v0) * p.mass;
}

Mat3 build_outer_G(const EulerZxy& eta, double T_trim, double L_trim,
                   double dL_dtheta, double mass) {
  const double cphi = std::cos(eta.phi), sphi = std::sin(eta.phi);
  const double cth = std::cos(eta.theta), sth = std::sin(eta.theta);
  const double cpsi = std::cos(eta.psi), spsi = std::sin(eta.psi);

  // Thrust tilt Jacobian; the last column is the thrust direction itself.
  Mat3 gt;
  gt << cphi * cth * spsi * T_trim, (cth * cpsi - sphi * sth * spsi) * T_trim,
      sth * cpsi + sphi * cth * spsi,
      -cphi * cth * cpsi * T_trim, (cth * spsi + sphi * sth * cpsi) * T_trim,
      sth * spsi - sphi * cth * cpsi,
      -sphi * cth * T_trim, -cphi * sth * T_trim, cphi * cth;

  // Lift tilt and lift slope; lift does not depend on the thrust setting.
  Mat3 gl;
  gl << cphi * spsi * L_trim, sphi * spsi * dL_dtheta, 0.0,
      -cphi * cpsi * L_trim, -sphi * cpsi * dL_dtheta, 0.0,
      -sphi * L_trim, cphi * dL_dtheta, 0.0;

  // Angle columns convert force to acceleration; the thrust column stays a
  // pure direction so the increment is a specific force, matching the
  // inner loop's thrust channel.
  Mat3 g = gt + gl;
  g.col(0) /= mass;
  g.col(1) /= mass;
  return g;
}

}  // namespace hoverwing
