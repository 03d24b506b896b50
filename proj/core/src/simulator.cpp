#include "hoverwing/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace hoverwing {

Plant::Plant(const PlantParams& params, double sample_hz)
    : params_(params), dt_(1.0 / sample_hz) {
  for (int i = 0; i < 4; ++i) {
    const bool flap = i < 2;
    servos_[i].pole = flap ? params_.flap_pole : params_.motor_pole;
    servos_[i].rate_limit = flap ? params_.flap_rate_limit
                                 : std::numeric_limits<double>::infinity();
    servos_[i].sample_hz = sample_hz;
  }
}

void Plant::reset(const PlantState& s) {
  state_ = s;
  state_.q = s.q.normalized();
  for (int i = 0; i < 4; ++i) servos_[i].reset(s.u(i));
}

double Plant::alpha(const PlantState& s, const Vec3& wind_ned) const {
  const Vec3 v_rel = s.q.to_rotmat().transpose() * (s.vel - wind_ned);
  if (std::hypot(v_rel(0), v_rel(2)) < 0.5) return 0.0;
  return std::atan2(v_rel(0), -v_rel(2));
}

double Plant::airspeed(const PlantState& s, const Vec3& wind_ned) const {
  return (s.vel - wind_ned).norm();
}

ForcesMoments Plant::forces(const PlantState& s, const Vec3& wind_ned) const {
  const PlantParams& p = params_;
  ForcesMoments fm;

  const Mat3 r_bn = s.q.to_rotmat().transpose();
  const Vec3 v_rel = r_bn * (s.vel - wind_ned);
  const double vx = v_rel(0), vy = v_rel(1), vz = v_rel(2);

  // Planar wing flow: incidence measured from the chord line, lift
  // perpendicular to the oncoming flow.
  const double v_xz = std::hypot(vx, vz);
  if (v_xz > 0.1) {
    const double al = std::atan2(vx, -vz);
    const double qbar = 0.5 * p.air_density * v_xz * v_xz;
    const double sa = std::sin(al), ca = std::cos(al);
    const double a_deg = std::abs(al) * 180.0 / M_PI;
    const double w_att =
        std::clamp((p.stall_end_deg - a_deg) /
                       (p.stall_end_deg - p.stall_start_deg),
                   0.0, 1.0);
    const double cl = w_att * p.lift_slope * al +
                      (1.0 - w_att) * p.post_stall_cl * std::sin(2.0 * al);
    const double cd = p.cd0 + p.induced_k * cl * cl +
                      (1.0 - w_att) * p.plate_cd * sa * sa;

    // Lift toward the suction side, drag along the flow.
    fm.force(0) += qbar * p.area * (cl * -ca + cd * (-vx / v_xz));
    fm.force(2) += qbar * p.area * (cl * -sa + cd * (-vz / v_xz));

    // Center of pressure walks aft with incidence: nose-down moment that
    // grows with dynamic pressure.
    fm.moment(1) +=
        -qbar * p.area * p.cn0 * p.cp_shift * p.chord * sa * sa * sa;
  }

  // Flat-plate side force opposing lateral flow.
  const double v_air = v_rel.norm();
  fm.force(1) += -0.5 * p.air_density * p.area * p.side_force_c * v_air * vy;

  // Flaps ride in the wash of the propeller on their own side; the signed
  // square keeps the force direction honest when descending through the
  // wash (flow reversal).
  const double v_ax = -vz;  // chordwise flow, leading edge to flaps
  const double flap_y[2] = {-p.flap_arm_y, p.flap_arm_y};
  const double flap_sign[2] = {-1.0, 1.0};
  const int pair_motor[2] = {kMotorRight, kMotorLeft};
  for (int i = 0; i < 2; ++i) {
    const double u_m = s.u(pair_motor[i]);
    const double vs2 = v_ax * std::abs(v_ax) + p.k_wash * u_m * u_m;
    const double fx = p.k_flap * vs2 * flap_sign[i] * s.u(i);
    fm.force(0) += fx;
    fm.moment(1) += p.flap_arm_z * fx;
    fm.moment(2) += -flap_y[i] * fx;
  }

  // Rotors: thrust along -Z, roll from the span offset, yaw from the
  // counter-rotating reaction torque.
  const double motor_y[2] = {p.motor_arm, -p.motor_arm};
  const double spin_dir[2] = {1.0, -1.0};
  for (int i = 0; i < 2; ++i) {
    const double u_m = s.u(kMotorLeft + i);
    const double thrust = p.k_thrust * u_m * u_m;
    fm.force(2) += -thrust;
    fm.moment(0) += -motor_y[i] * thrust;
    fm.moment(2) += spin_dir[i] * p.k_motor_yaw * thrust;
  }

  fm.moment -= p.rot_damping.cwiseProduct(s.omega);
  return fm;
}

Plant::Deriv Plant::deriv(const PlantState& s, const Vec3& wind_ned) const {
  const ForcesMoments fm = forces(s, wind_ned);
  Deriv d;
  d.acc_ned = Vec3(0.0, 0.0, params_.gravity) +
              s.q.to_rotmat() * fm.force / params_.mass;
  const Vec3 iw = params_.inertia.cwiseProduct(s.omega);
  d.omega_dot =
      (fm.moment - s.omega.cross(iw)).cwiseQuotient(params_.inertia);
  return d;
}

Vec3 Plant::specific_force_body(const PlantState& s,
                                const Vec3& wind_ned) const {
  return forces(s, wind_ned).force / params_.mass;
}

void Plant::step(const Vec4& u_cmd, const Vec3& wind_ned) {
  for (int i = 0; i < 4; ++i) state_.u(i) = servos_[i].step(u_cmd(i));
  const Deriv d = deriv(state_, wind_ned);
  state_.vel += d.acc_ned * dt_;
  state_.pos += state_.vel * dt_;
  state_.omega += d.omega_dot * dt_;
  state_.q = quat_integrate(state_.q, state_.omega, dt_).normalized();
  state_.t += dt_;
}

double Plant::hover_motor_cmd() const {
  return std::sqrt(params_.mass * params_.gravity / (2.0 * params_.k_thrust));
}

SensorSuite::SensorSuite(const SensorParams& params, std::uint64_t seed,
                         double sample_hz)
    : params_(params), sample_hz_(sample_hz), rng_(seed) {
  gnss_divider_ = std::max(1, static_cast<int>(std::lround(
                                  sample_hz / params.gnss_rate_hz)));
  latency_steps_ = std::max(0, static_cast<int>(std::lround(
                                   params.gnss_latency_s * sample_hz)));
}

void SensorSuite::reset(const PlantState& s) {
  pos_hist_.clear();
  vel_hist_.clear();
  gnss_pos_ = s.pos;
  gnss_vel_ = s.vel;
  tick_ = 0;
}

SensorSnapshot SensorSuite::sense(const Plant& plant, const Vec3& wind_ned) {
  const PlantState& st = plant.state();
  const bool quiet = params_.noiseless;
  SensorSnapshot out;
  out.t = st.t;
  out.q = st.q;

  out.gyro = st.omega;
  out.accel_body = plant.specific_force_body(st, wind_ned);
  if (!quiet) {
    out.gyro += params_.sigma_gyro * rng_.next3();
    out.accel_body += params_.sigma_accel * rng_.next3();
  }

  const double v_air = plant.airspeed(st, wind_ned);
  const double al = plant.alpha(st, wind_ned);
  out.airspeed_valid =
      v_air >= params_.pitot_min_speed &&
      std::abs(al) <= params_.pitot_max_alpha_deg * M_PI / 180.0;
  if (out.airspeed_valid) {
    out.airspeed = v_air + (quiet ? 0.0 : params_.sigma_pitot * rng_.next());
  }

  pos_hist_.push_back(st.pos);
  vel_hist_.push_back(st.vel);
  const size_t keep = static_cast<size_t>(latency_steps_) + 1;
  while (pos_hist_.size() > keep) {
    pos_hist_.pop_front();
    vel_hist_.pop_front();
  }
  if (tick_ % gnss_divider_ == 0) {
    gnss_pos_ = pos_hist_.front();
    gnss_vel_ = vel_hist_.front();
    if (!quiet) {
      gnss_pos_ += params_.sigma_pos * rng_.next3();
      gnss_vel_ += params_.sigma_vel * rng_.next3();
    }
  }
  out.gnss_pos = gnss_pos_;
  out.gnss_vel = gnss_vel_;
  ++tick_;
  return out;
}

Vec3 steady_wind(const WindConfig& cfg, double t) {
  const double from = cfg.from_deg * M_PI / 180.0;
  Vec3 w = -cfg.speed * Vec3(std::cos(from), std::sin(from), 0.0);
  const GustConfig& g = cfg.gust;
  if (g.duration > 0.0 && t >= g.t0 && t <= g.t0 + g.duration) {
    const double shape =
        0.5 * (1.0 - std::cos(2.0 * M_PI * (t - g.t0) / g.duration));
    w += g.peak * shape * g.dir.normalized();
  }
  return w;
}

WindField::WindField(const WindConfig& cfg, std::uint64_t seed,
                     double sample_hz)
    : cfg_(cfg),
      rng_(seed),
      filter_(cfg.turb_cutoff_hz, sample_hz) {
  // White noise through the low-pass keeps roughly
  // 2*ENBW/fs of its variance; scale so the output sigma matches.
  if (cfg.turb_sigma > 0.0) {
    gain_ = cfg.turb_sigma *
            std::sqrt(sample_hz / (2.22 * cfg.turb_cutoff_hz));
  }
  filter_.reset(Vec3::Zero());
}

Vec3 WindField::step(double t) {
  if (gain_ > 0.0) {
    turb_ = *filter_.step(gain_ * rng_.next3());
  }
  return steady_wind(cfg_, t) + turb_;
}

}  // namespace hoverwing
