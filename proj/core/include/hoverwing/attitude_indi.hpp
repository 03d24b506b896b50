#pragma once

#include <array>

#include "hoverwing/allocation.hpp"
#include "hoverwing/effectiveness.hpp"
#include "hoverwing/filters.hpp"
#include "hoverwing/frames.hpp"

namespace hoverwing {

/// Attitude gains. Pitch reacts through the flaps, roll through the slower
/// motors, so pitch can run a higher gain in hover; above the equalize
/// speed both axes use the roll gain to keep turns coordinated.
struct AttitudeGains {
  double k_eta_roll = 7.6;
  double k_eta_pitch = 13.3;
  double k_eta_yaw = 7.6;
  Vec3 k_omega{28.0, 28.0, 28.0};
  bool equalize_in_cruise = true;
  double equalize_speed = 12.0;      // m/s
  double equalize_hysteresis = 1.0;  // m/s
};

struct AttitudeIndiParams {
  double sample_hz = 500.0;
  double signal_cutoff_hz = 5.0;  // gyro / specific force / actuator states
  AttitudeGains gains;
  InnerScheduleParams schedule;

  Vec4 allocation_weights{100.0, 1000.0, 0.1, 10.0};
  double allocation_gamma = 1e-4;
  int allocation_iterations = 16;

  // Actuator-state models (same structure as the plant servos).
  double flap_pole = 0.1;
  double flap_rate_limit = 272.0 / 30.0 * 9600.0;  // units/s
  double motor_pole = 0.045;
};

/// Rate reference from the canonical attitude error: proportional feedback
/// on the quaternion vector part.
Vec3 rate_reference(const Quat& q_err, const Vec3& k_eta);

/// Virtual control: angular-acceleration demand plus the thrust-increment
/// channel, which passes through untouched.
Vec4 virtual_control(const Vec3& omega_ref, const Vec3& omega,
                     const Vec3& k_omega, double dT_d);

/// One incremental inversion: u_c = u_f + du with du allocated toward
/// dnu = nu - [filtered angular accel; 0] under the command-range box.
/// The thrust channel of nu is already an increment.
struct InnerStepResult {
  Vec4 u_c = Vec4::Zero();
  AllocationSolution allocation;
};
InnerStepResult inner_indi_step(const Vec4& dnu, const Mat4& G,
                                const Vec4& u_f, double motor_floor,
                                const AttitudeIndiParams& p);

struct AttitudeSensors {
  Quat q_state;
  Vec3 gyro = Vec3::Zero();  // rad/s
  double f_z = 0.0;          // body-Z specific force, m/s^2
  double airspeed = 0.0;
  bool airspeed_valid = false;
};

struct AttitudeCommand {
  Quat q_ref;
  double dT_d = 0.0;  // desired specific-force increment, m/s^2
};

/// Per-tick diagnostics for logging and tests.
struct AttitudeDebug {
  Vec3 omega_ref = Vec3::Zero();
  Vec4 nu = Vec4::Zero();
  Vec3 omega_dot_f = Vec3::Zero();
  double t_f = 0.0;
  Vec4 u_f = Vec4::Zero();
  Vec4 du = Vec4::Zero();
  std::array<bool, 4> saturated{false, false, false, false};
  bool thrust_pitch_gate = false;
  double motor_floor = 0.0;
  bool allocation_converged = true;
  bool fault = false;
  Vec3 k_eta = Vec3::Zero();
};

/// Stateful 500 Hz inner loop: filter synchronization, actuator-state
/// bookkeeping, gain schedule and the incremental inversion.
class AttitudeIndi {
 public:
  explicit AttitudeIndi(const AttitudeIndiParams& params);

  /// Initialize actuator states and warm-start all filters.
  void reset(const Vec4& u0, const AttitudeSensors& sensors);

  Vec4 step(const AttitudeSensors& sensors, const AttitudeCommand& cmd,
            AttitudeDebug* dbg = nullptr);

  const Vec4& last_command() const { return u_c_prev_; }
  const Vec4& filtered_actuators() const { return u_f_; }
  double filtered_thrust() const { return t_f_; }
  bool cruise_gains() const { return cruise_gains_; }

 private:
  Vec3 scheduled_k_eta(double V, bool valid);

  AttitudeIndiParams params_;
  Lowpass3 gyro_filter_;
  Butter2Lowpass fz_filter_;
  std::array<Butter2Lowpass, 4> u_filters_;
  std::array<ActuatorModel, 4> u_models_;

  Vec3 omega_f_prev_ = Vec3::Zero();
  Vec4 u_f_ = Vec4::Zero();
  Vec4 u_c_prev_ = Vec4::Zero();
  double t_f_ = 0.0;
  double psi_last_ = 0.0;
  bool cruise_gains_ = false;
  bool initialized_ = false;
};

}  // namespace hoverwing
