#include "hoverwing/attitude_indi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hoverwing {

Vec3 rate_reference(const Quat& q_err, const Vec3& k_eta) {
  return k_eta.cwiseProduct(q_err.vec());
}

Vec4 virtual_control(const Vec3& omega_ref, const Vec3& omega,
                     const Vec3& k_omega, double dT_d) {
  Vec4 nu;
  nu.head<3>() = k_omega.cwiseProduct(omega_ref - omega);
  nu(3) = dT_d;
  return nu;
}

InnerStepResult inner_indi_step(const Vec4& dnu, const Mat4& G,
                                const Vec4& u_f, double motor_floor,
                                const AttitudeIndiParams& p) {
  AllocationProblem prob;
  prob.G = G;
  prob.dnu = dnu;
  prob.Wv = p.allocation_weights;
  prob.gamma = p.allocation_gamma;

  // Increment box from the command ranges; zero must stay inside even if
  // the filtered state sits outside a bound (e.g. just after a floor
  // change), so the increment can only move back toward the range.
  const double lo[4] = {-kFlapCmdLimit, -kFlapCmdLimit, motor_floor,
                        motor_floor};
  const double hi[4] = {kFlapCmdLimit, kFlapCmdLimit, kMotorCmdMax,
                        kMotorCmdMax};
  for (int i = 0; i < 4; ++i) {
    prob.du_min(i) = std::min(0.0, lo[i] - u_f(i));
    prob.du_max(i) = std::max(0.0, hi[i] - u_f(i));
  }

  InnerStepResult out;
  out.allocation = wls_allocate(prob, p.allocation_iterations);
  for (int i = 0; i < 4; ++i) {
    out.u_c(i) = std::clamp(u_f(i) + out.allocation.du(i), lo[i], hi[i]);
  }
  return out;
}

AttitudeIndi::AttitudeIndi(const AttitudeIndiParams& params)
    : params_(params),
      gyro_filter_(params.signal_cutoff_hz, params.sample_hz),
      fz_filter_(params.signal_cutoff_hz, params.sample_hz) {
  for (int i = 0; i < 4; ++i) {
    u_filters_[i] = Butter2Lowpass(params.signal_cutoff_hz, params.sample_hz);
    const bool flap = i < 2;
    u_models_[i].pole = flap ? params.flap_pole : params.motor_pole;
    u_models_[i].rate_limit = flap
                                  ? params.flap_rate_limit
                                  : std::numeric_limits<double>::infinity();
    u_models_[i].sample_hz = params.sample_hz;
  }
}

void AttitudeIndi::reset(const Vec4& u0, const AttitudeSensors& sensors) {
  u_c_prev_ = u0;
  u_f_ = u0;
  for (int i = 0; i < 4; ++i) {
    u_models_[i].reset(u0(i));
    u_filters_[i].reset(u0(i));
  }
  gyro_filter_.reset(sensors.gyro);
  omega_f_prev_ = sensors.gyro;
  fz_filter_.reset(sensors.f_z);
  t_f_ = sensors.f_z;
  psi_last_ = euler_zxy_from_quat(sensors.q_state, psi_last_).psi;
  cruise_gains_ = false;
  initialized_ = true;
}

Vec3 AttitudeIndi::scheduled_k_eta(double V, bool valid) {
  const auto& g = params_.gains;
  if (g.equalize_in_cruise) {
    const double up = g.equalize_speed;
    const double down = g.equalize_speed - g.equalize_hysteresis;
    if (valid && V > up) {
      cruise_gains_ = true;
    } else if (!valid || V < down) {
      cruise_gains_ = false;
    }
  } else {
    cruise_gains_ = false;
  }
  const double pitch = cruise_gains_ ? g.k_eta_roll : g.k_eta_pitch;
  return {g.k_eta_roll, pitch, g.k_eta_yaw};
}

Vec4 AttitudeIndi::step(const AttitudeSensors& sensors,
                        const AttitudeCommand& cmd, AttitudeDebug* dbg) {
  if (!initialized_) reset(u_c_prev_, sensors);

  const bool input_ok =
      sensors.gyro.allFinite() && std::isfinite(sensors.f_z) &&
      std::isfinite(sensors.q_state.norm()) && std::isfinite(cmd.dT_d);
  if (!input_ok) {
    if (dbg) dbg->fault = true;
    return u_c_prev_;  // hold last command, never propagate a NaN
  }

  // Advance the actuator-state models with the previously issued command,
  // then filter so u_f stays synchronized with the filtered sensors.
  Vec4 u_raw;
  for (int i = 0; i < 4; ++i) u_raw(i) = u_models_[i].step(u_c_prev_(i));
  for (int i = 0; i < 4; ++i) u_f_(i) = *u_filters_[i].step(u_raw(i));

  const Vec3 omega_f = *gyro_filter_.step(sensors.gyro);
  const Vec3 omega_dot_f = (omega_f - omega_f_prev_) * params_.sample_hz;
  omega_f_prev_ = omega_f;
  t_f_ = *fz_filter_.step(sensors.f_z);

  const EulerZxy eta = euler_zxy_from_quat(sensors.q_state, psi_last_);
  psi_last_ = eta.psi;

  const Vec3 k_eta = scheduled_k_eta(sensors.airspeed, sensors.airspeed_valid);
  const Quat q_err = quat_error(cmd.q_ref, sensors.q_state);
  const Vec3 omega_ref = rate_reference(q_err, k_eta);
  const Vec4 nu =
      virtual_control(omega_ref, sensors.gyro, params_.gains.k_omega, cmd.dT_d);

  ScheduleInputs sched;
  sched.theta = eta.theta;
  sched.airspeed = sensors.airspeed;
  sched.airspeed_valid = sensors.airspeed_valid;
  sched.u_f = u_f_;
  const Mat4 G = build_inner_G(sched, params_.schedule);
  const double floor =
      thrust_floor(sensors.airspeed, sensors.airspeed_valid, params_.schedule);

  Vec4 dnu;
  dnu.head<3>() = nu.head<3>() - omega_dot_f;
  dnu(3) = nu(3);  // thrust channel is already incremental

  const InnerStepResult res = inner_indi_step(dnu, G, u_f_, floor, params_);

  if (!res.u_c.allFinite()) {
    if (dbg) dbg->fault = true;
    return u_c_prev_;
  }

  if (dbg) {
    dbg->omega_ref = omega_ref;
    dbg->nu = nu;
    dbg->omega_dot_f = omega_dot_f;
    dbg->t_f = t_f_;
    dbg->u_f = u_f_;
    dbg->du = res.allocation.du;
    for (int i = 0; i < 4; ++i) {
      dbg->saturated[i] = res.allocation.active[i] != BoundState::kFree;
    }
    dbg->thrust_pitch_gate = G(1, 2) != 0.0;
    dbg->motor_floor = floor;
    dbg->allocation_converged = res.allocation.converged;
    dbg->k_eta = k_eta;
  }

  u_c_prev_ = res.u_c;
  return res.u_c;
}

}  // namespace hoverwing
