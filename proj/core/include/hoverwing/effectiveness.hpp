#pragma once

#include <numbers>

#include "hoverwing/frames.hpp"

namespace hoverwing {

// Actuator vector layout, shared by the controller, allocator and plant.
enum ActuatorIndex : int {
  kFlapLeft = 0,
  kFlapRight = 1,
  kMotorLeft = 2,
  kMotorRight = 3,
};

constexpr double kFlapCmdLimit = 9600.0;   // maps to 30 deg deflection each way
constexpr double kMotorCmdMax = 9600.0;
constexpr double kFlapDeflectionRad = 30.0 * std::numbers::pi / 180.0;

/// Inner-loop schedule constants. Defaults are the flight-identified values;
/// other airframes can override them through the vehicle config.
struct InnerScheduleParams {
  // Flap pitch effectiveness, rad/s^2 per command unit. Low speed blends
  // between the hover and high-pitch values; measurable airspeed switches
  // to the quadratic a + b*V^2.
  double pitch_hover = -2.1e-3;
  double pitch_fwd = -4.0e-3;
  double pitch_a = -2.4e-3;
  double pitch_b = -0.031e-3;

  // Flap yaw effectiveness, same structure.
  double yaw_hover = -2.0e-3;
  double yaw_fwd = -8.0e-3;
  double yaw_a = -5.6e-3;
  double yaw_b = -0.052e-3;

  // Low-speed pitch blend ramp, degrees.
  double ramp_start_deg = -30.0;
  double ramp_end_deg = -60.0;

  // Motor effectiveness: roll scales with the filtered motor state
  // (quadratic thrust, linearized), thrust on specific force is static.
  double motor_roll_k = 1.8e-6;
  double motor_thrust = -0.0011;  // m/s^2 per command unit

  // Thrust-on-pitch assist: only active when both flaps are pinned past
  // the gate with opposite signs. Value is rad/s^2 per percent thrust.
  double thrust_pitch = 2.2;
  double flap_gate = 7000.0;
  double units_per_pct_thrust = 96.0;  // 1% of the motor command range

  // Pitot handover and minimum motor command (flow over the flaps).
  double airspeed_measurable = 6.0;    // m/s
  double floor_low_frac = 0.42;
  double floor_high_frac = 0.16;
  double floor_speed = 8.0;            // m/s, strict V < floor_speed
};

/// Outer-loop (acceleration) schedule constants.
struct OuterScheduleParams {
  double mass = 1.2;  // kg

  // Trim lift/thrust split: gravity shared between the wing and the
  // rotors as the vehicle pitches over.
  double gravity = 9.81;

  // Lift slope vs pitch, N/rad (after multiplying by mass): low-speed
  // ramp value and the high-speed linear law slope*(V - v0).
  double slope_hover = -24.0;
  double slope_gain = -6.88;
  double slope_v0 = 8.5;
  double slope_speed_switch = 12.0;  // m/s
  double ramp_start_deg = -40.0;
  double ramp_end_deg = -80.0;

  // Divide trim lift by cos(phi) to account for turn load factor.
  // Not used by default.
  bool cos_phi_correction = false;
};

/// Pitch blend factor used by the low-speed flap schedules:
/// 0 at start_deg and above, 1 at end_deg and below, linear between.
double pitch_ramp(double theta, double start_deg, double end_deg);

/// Schedule inputs snapshotted once per tick.
struct ScheduleInputs {
  double theta = 0.0;          // rad
  double airspeed = 0.0;       // m/s
  bool airspeed_valid = false; // pitot in its envelope
  Vec4 u_f = Vec4::Zero();     // filtered actuator states
};

double flap_pitch_eff(double theta, double V, bool V_valid,
                      const InnerScheduleParams& p);  // G21; G22 = -G21
double flap_yaw_eff(double theta, double V, bool V_valid,
                    const InnerScheduleParams& p);    // G31 = G32

/// Roll effectiveness of each motor, linearized around the filtered state.
void motor_roll_eff(double u_f3, double u_f4, const InnerScheduleParams& p,
                    double& g13, double& g14);

/// Thrust-on-pitch effectiveness in rad/s^2 per percent thrust:
/// zero unless both flaps are past the gate with opposite signs.
double thrust_pitch_eff(double u_f1, double u_f2,
                        const InnerScheduleParams& p);

/// Assembled 4x4 inner effectiveness. Rows: roll, pitch, yaw angular
/// acceleration (rad/s^2 per unit) and specific force (m/s^2 per unit).
/// Columns follow ActuatorIndex.
Mat4 build_inner_G(const ScheduleInputs& s, const InnerScheduleParams& p);

/// Minimum motor command keeping propeller flow over the flaps.
double thrust_floor(double V, bool V_valid, const InnerScheduleParams& p);

/// Trim forces in N; theta is clamped to [-pi/2, 0] inside.
double lift_trim(double theta, const OuterScheduleParams& p);
double thrust_trim(double theta, const OuterScheduleParams& p);

/// Lift change per radian of pitch, N/rad.
double lift_slope(double theta, double V, const OuterScheduleParams& p);

/// 3x3 outer effectiveness mapping increments of [phi, theta, T] to NED
/// acceleration. Columns phi/theta are per rad, the thrust column maps a
/// specific-force increment (m/s^2) so it feeds the inner loop directly.
/// T_trim and L_trim are forces in N, dL_dtheta in N/rad.
Mat3 build_outer_G(const EulerZxy& eta, double T_trim, double L_trim,
                   double dL_dtheta, double mass);

}  // namespace hoverwing
