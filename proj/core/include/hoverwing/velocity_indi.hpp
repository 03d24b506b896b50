#pragma once

#include "hoverwing/effectiveness.hpp"
#include "hoverwing/filters.hpp"
#include "hoverwing/frames.hpp"

namespace hoverwing {

struct OuterLoopParams {
  double sample_hz = 500.0;
  int rate_divider = 1;  // run the inversion every N ticks, hold in between
  double signal_cutoff_hz = 5.0;
  OuterScheduleParams schedule;

  // Flap-lift remediation. The compensator subtracts the transient flap
  // force from the acceleration measurement; the alternative scales the
  // pitch column so the loop takes smaller pitch increments.
  bool compensator_enabled = true;
  double g_flap = 0.0;  // m/s^2 per command unit on (-u_left + u_right)
  double comp_cutoff_hz = 0.5;
  double pitch_eff_scale = 1.0;  // 2.0 selects the column-scaling remedy

  double cond_limit = 1e6;  // switch to regularized solve above this
};

/// Transient lateral-force term of the flaps, high-passed so a held
/// deflection contributes nothing.
class FlapLiftCompensator {
 public:
  FlapLiftCompensator() = default;
  FlapLiftCompensator(double cutoff_hz, double sample_hz, double g_flap)
      : hp_(cutoff_hz, sample_hz), g_flap_(g_flap) {}

  void reset() { hp_.reset(0.0); }

  /// Body-X acceleration attributed to flap motion, m/s^2.
  double step(double u_f_left, double u_f_right) {
    const double s = -u_f_left + u_f_right;
    if (auto y = hp_.step(s)) last_ = *y * g_flap_;
    return last_;
  }

  double last() const { return last_; }

 private:
  Butter4Highpass hp_;
  double g_flap_{0.0};
  double last_{0.0};
};

Vec3 compensate_flap_lift(const Vec3& xi_ddot_f, double flap_accel_x,
                          const Mat3& m_nb);

/// Bridge from the [phi, theta] solution and the heading reference to the
/// inner-loop attitude parameterization.
inline Quat reference_attitude(double phi, double theta, double psi) {
  return quat_from_euler_zxy({phi, theta, psi});
}

struct AttitudeSetpoint {
  double phi = 0.0;
  double theta = 0.0;
  double dT = 0.0;  // specific-force increment for the inner thrust channel
};

struct OuterSensors {
  Vec3 accel_ned = Vec3::Zero();  // specific force + gravity, m/s^2
  Quat q_state = Quat::identity();
  double f_z = 0.0;  // body-Z specific force, m/s^2
  double airspeed = 0.0;
  Vec4 u_f = Vec4::Zero();  // filtered actuator states from the inner loop
};

struct OuterDebug {
  Vec3 xi_ddot_f = Vec3::Zero();
  Vec3 xi_ddot_comp = Vec3::Zero();
  Vec3 v = Vec3::Zero();  // [phi, theta, T] after the increment
  double flap_accel = 0.0;
  bool near_singular = false;
  bool fault = false;
};

/// Acceleration controller: filtered-state increments of attitude and
/// thrust from the NED acceleration error.
class VelocityIndi {
 public:
  explicit VelocityIndi(const OuterLoopParams& params);

  void reset(const OuterSensors& sensors);

  AttitudeSetpoint step(const OuterSensors& sensors, const Vec3& accel_ref,
                        OuterDebug* dbg = nullptr);

  const OuterLoopParams& params() const { return params_; }

 private:
  OuterLoopParams params_;
  Lowpass3 accel_filter_;
  Butter2Lowpass phi_filter_;
  Butter2Lowpass theta_filter_;
  Butter2Lowpass fz_filter_;
  FlapLiftCompensator comp_;
  double psi_last_{0.0};
  int tick_{0};
  AttitudeSetpoint held_{};
  bool initialized_{false};
};

}  // namespace hoverwing
