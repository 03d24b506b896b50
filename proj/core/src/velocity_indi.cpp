#include "hoverwing/velocity_indi.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace hoverwing {

namespace {
constexpr double kThetaMin = -0.5 * M_PI;
constexpr double kThetaMax = 25.0 * M_PI / 180.0;
constexpr double kMaxBank = 60.0 * M_PI / 180.0;
constexpr double kMaxAngleStep = 20.0 * M_PI / 180.0;  // per inversion
constexpr double kMaxThrustStep = 2.0 * 9.81;          // m/s^2
}  // namespace

Vec3 compensate_flap_lift(const Vec3& xi_ddot_f, double flap_accel_x,
                          const Mat3& m_nb) {
  return xi_ddot_f - m_nb * Vec3(flap_accel_x, 0.0, 0.0);
}

VelocityIndi::VelocityIndi(const OuterLoopParams& params)
    : params_(params),
      accel_filter_(params.signal_cutoff_hz, params.sample_hz),
      phi_filter_(params.signal_cutoff_hz, params.sample_hz),
      theta_filter_(params.signal_cutoff_hz, params.sample_hz),
      fz_filter_(params.signal_cutoff_hz, params.sample_hz),
      comp_(params.comp_cutoff_hz, params.sample_hz, params.g_flap) {}

void VelocityIndi::reset(const OuterSensors& sensors) {
  accel_filter_.reset(sensors.accel_ned);
  const EulerZxy eta = euler_zxy_from_quat(sensors.q_state, psi_last_);
  psi_last_ = eta.psi;
  phi_filter_.reset(eta.phi);
  theta_filter_.reset(eta.theta);
  fz_filter_.reset(sensors.f_z);
  comp_.reset();
  tick_ = 0;
  held_ = {eta.phi, eta.theta, 0.0};
  initialized_ = true;
}

AttitudeSetpoint VelocityIndi::step(const OuterSensors& sensors,
                                    const Vec3& accel_ref, OuterDebug* dbg) {
  if (!initialized_) reset(sensors);

  const bool input_ok = sensors.accel_ned.allFinite() && accel_ref.allFinite() &&
                        std::isfinite(sensors.f_z) && sensors.u_f.allFinite();
  if (!input_ok) {
    if (dbg) dbg->fault = true;
    return held_;
  }

  const EulerZxy eta = euler_zxy_from_quat(sensors.q_state, psi_last_);
  psi_last_ = eta.psi;

  const Vec3 xi_ddot_f = *accel_filter_.step(sensors.accel_ned);
  const double phi_f = *phi_filter_.step(eta.phi);
  const double theta_f = *theta_filter_.step(eta.theta);
  const double t_f = *fz_filter_.step(sensors.f_z);

  const Mat3 m_nb = sensors.q_state.to_rotmat();
  const double flap_accel =
      comp_.step(sensors.u_f(kFlapLeft), sensors.u_f(kFlapRight));
  const Vec3 xi_ddot_comp = params_.compensator_enabled
                                ? compensate_flap_lift(xi_ddot_f, flap_accel, m_nb)
                                : xi_ddot_f;

  if (dbg) {
    dbg->xi_ddot_f = xi_ddot_f;
    dbg->xi_ddot_comp = xi_ddot_comp;
    dbg->flap_accel = flap_accel;
  }

  // Filters always advance; the inversion runs on the divided rate.
  const int phase = tick_++ % std::max(params_.rate_divider, 1);
  if (phase != 0) {
    if (dbg) dbg->v = Vec3(held_.phi, held_.theta, t_f + held_.dT);
    return held_;
  }

  const auto& sch = params_.schedule;
  double t_trim = thrust_trim(theta_f, sch);
  double l_trim = lift_trim(theta_f, sch);
  if (sch.cos_phi_correction) {
    // Banked-turn load factor; bounded away from the knife-edge singularity.
    const double c = std::max(std::cos(phi_f), 0.2);
    t_trim /= c;
    l_trim /= c;
  }
  const double dl_dth = lift_slope(theta_f, sensors.airspeed, sch);

  Mat3 G = build_outer_G({phi_f, theta_f, psi_last_}, t_trim, l_trim, dl_dth,
                         sch.mass);
  if (params_.pitch_eff_scale != 1.0) G.col(1) *= params_.pitch_eff_scale;

  const Vec3 err = accel_ref - xi_ddot_comp;

  Eigen::JacobiSVD<Mat3> svd(G, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = svd.singularValues()(2);
  const double smax = svd.singularValues()(0);
  Vec3 dv;
  bool near_singular = false;
  if (smin <= 0.0 || smax / smin > params_.cond_limit) {
    near_singular = true;
    const Mat3 gtg = G.transpose() * G;
    const double lambda = 1e-6 * gtg.trace();
    dv = (gtg + lambda * Mat3::Identity()).ldlt().solve(G.transpose() * err);
  } else {
    dv = svd.solve(err);
  }

  // Trust region: the incremental linearization is only valid for small
  // attitude steps, and a big residual during an upset must not demand a
  // quarter-turn in one tick. Bank stays well clear of the roll
  // singularity of the Euler sequence.
  dv(0) = std::clamp(dv(0), -kMaxAngleStep, kMaxAngleStep);
  dv(1) = std::clamp(dv(1), -kMaxAngleStep, kMaxAngleStep);
  dv(2) = std::clamp(dv(2), -kMaxThrustStep, kMaxThrustStep);

  AttitudeSetpoint sp;
  sp.phi = std::clamp(phi_f + dv(0), -kMaxBank, kMaxBank);
  sp.theta = std::clamp(theta_f + dv(1), kThetaMin, kThetaMax);
  sp.dT = dv(2);

  if (!std::isfinite(sp.phi) || !std::isfinite(sp.theta) ||
      !std::isfinite(sp.dT)) {
    if (dbg) dbg->fault = true;
    return held_;
  }

  if (dbg) {
    dbg->v = Vec3(sp.phi, sp.theta, t_f + sp.dT);
    dbg->near_singular = near_singular;
  }
  held_ = sp;
  return sp;
}

}  // namespace hoverwing
