#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <random>

#include "hoverwing/effectiveness.hpp"
#include "hoverwing/filters.hpp"
#include "hoverwing/frames.hpp"

namespace hoverwing {

/// Portable normal deviates: mersenne twister + Box-Muller, so streams are
/// bit-identical across standard libraries (std::normal_distribution is not).
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_) {
      have_ = false;
      return cached_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform_pos();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

  Vec3 next3() { return {next(), next(), next()}; }

 private:
  // Uniform in (0,1): top 53 bits of the generator, offset off zero.
  double uniform_pos() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  std::mt19937_64 gen_;
  bool have_{false};
  double cached_{0.0};
};

/// Synthetic airframe coefficients. These describe the simulated vehicle,
/// not the controller's effectiveness schedules; the two agree only to
/// within the mismatch the incremental loops are supposed to absorb.
struct PlantParams {
  double mass = 1.2;        // kg
  double gravity = 9.81;    // m/s^2
  double air_density = 1.225;
  Vec3 inertia{0.034, 0.009, 0.025};  // kg m^2, diagonal

  double chord = 0.3;  // m
  double area = 0.15;  // m^2

  // Rotors: thrust k*u^2 along -Z, one each side of the span.
  double k_thrust = 1.273e-7;  // N per unit^2
  double motor_arm = 0.24;     // m; motor 3 at +y, motor 4 at -y
  double k_motor_yaw = 0.01;   // prop reaction torque per N thrust
  double motor_pole = 0.045;

  // Flaps in the propeller wash at the trailing edge. Force along body X,
  // scaled by the signed slipstream dynamic pressure so descent can stall
  // or reverse them.
  double flap_arm_y = 0.24;  // m; flap 1 at -y, flap 2 at +y
  double flap_arm_z = 0.08;  // m aft of the reference point
  double k_flap = 4.4e-6;    // N per (m/s)^2 per command unit
  double k_wash = 1.27e-6;   // wash (m/s)^2 per unit^2 of the paired motor
  double flap_pole = 0.1;
  double flap_rate_limit = 87040.0;  // units/s

  // Wing: attached law at small incidence, flat plate beyond stall.
  double lift_slope = 2.8;  // per rad
  double cd0 = 0.03;
  double induced_k = 0.24;
  double stall_start_deg = 15.0;
  double stall_end_deg = 25.0;
  double post_stall_cl = 1.1;
  double plate_cd = 1.8;

  // Center-of-pressure travel: nose-down moment growing with incidence
  // and dynamic pressure.
  double cn0 = 1.2;
  double cp_shift = 0.15;  // fraction of chord

  double side_force_c = 0.26;            // per rad of sideslip
  Vec3 rot_damping{0.010, 0.012, 0.010};  // N m s
};

struct PlantState {
  Vec3 pos = Vec3::Zero();  // NED, m
  Vec3 vel = Vec3::Zero();  // NED, m/s
  Quat q = Quat::identity();
  Vec3 omega = Vec3::Zero();  // body, rad/s
  Vec4 u = Vec4::Zero();      // physical actuator positions
  double t = 0.0;
};

struct ForcesMoments {
  Vec3 force = Vec3::Zero();   // body, N (aero + thrust, no gravity)
  Vec3 moment = Vec3::Zero();  // body, N m
};

class Plant {
 public:
  explicit Plant(const PlantParams& params, double sample_hz = 500.0);

  void reset(const PlantState& s);
  const PlantState& state() const { return state_; }
  const PlantParams& params() const { return params_; }

  /// Advance one control period: servo/motor lags first, then rigid-body
  /// semi-implicit Euler at the frozen actuator state.
  void step(const Vec4& u_cmd, const Vec3& wind_ned);

  /// Body forces and moments at a given state (fixed actuators).
  ForcesMoments forces(const PlantState& s, const Vec3& wind_ned) const;

  struct Deriv {
    Vec3 acc_ned = Vec3::Zero();
    Vec3 omega_dot = Vec3::Zero();
  };
  Deriv deriv(const PlantState& s, const Vec3& wind_ned) const;

  /// Accelerometer truth: non-gravitational acceleration in body axes.
  Vec3 specific_force_body(const PlantState& s, const Vec3& wind_ned) const;

  /// Incidence of the planar flow, rad; zero when too slow to define.
  double alpha(const PlantState& s, const Vec3& wind_ned) const;
  /// Airspeed magnitude seen by the airframe.
  double airspeed(const PlantState& s, const Vec3& wind_ned) const;

  /// Per-motor command that balances weight at hover.
  double hover_motor_cmd() const;

 private:
  PlantParams params_;
  double dt_;
  PlantState state_;
  ActuatorModel servos_[4];
};

struct SensorParams {
  double sigma_gyro = 0.002;   // rad/s
  double sigma_accel = 0.05;   // m/s^2
  double sigma_pitot = 0.1;    // m/s
  double sigma_pos = 0.02;     // m
  double sigma_vel = 0.02;     // m/s
  double gnss_rate_hz = 10.0;
  double gnss_latency_s = 0.1;
  double pitot_min_speed = 6.0;
  double pitot_max_alpha_deg = 30.0;
  bool noiseless = false;
};

struct SensorSnapshot {
  double t = 0.0;
  Vec3 gyro = Vec3::Zero();
  Vec3 accel_body = Vec3::Zero();  // specific force
  Quat q = Quat::identity();       // attitude, exact
  double airspeed = 0.0;
  bool airspeed_valid = false;
  Vec3 gnss_pos = Vec3::Zero();
  Vec3 gnss_vel = Vec3::Zero();
};

/// Measurement models on the control grid. GNSS output is held between
/// updates and delayed by the configured latency.
class SensorSuite {
 public:
  SensorSuite(const SensorParams& params, std::uint64_t seed,
              double sample_hz = 500.0);

  SensorSnapshot sense(const Plant& plant, const Vec3& wind_ned);
  void reset(const PlantState& s);

 private:
  SensorParams params_;
  double sample_hz_;
  GaussianRng rng_;
  std::deque<Vec3> pos_hist_, vel_hist_;
  int gnss_divider_;
  int latency_steps_;
  int tick_{0};
  Vec3 gnss_pos_ = Vec3::Zero();
  Vec3 gnss_vel_ = Vec3::Zero();
};

struct GustConfig {
  double t0 = 0.0;
  double duration = 0.0;  // zero disables
  double peak = 0.0;      // m/s
  Vec3 dir = Vec3::UnitX();
};

struct WindConfig {
  double speed = 0.0;     // m/s
  double from_deg = 0.0;  // compass bearing the wind blows from
  GustConfig gust;
  double turb_sigma = 0.0;  // m/s per axis
  double turb_cutoff_hz = 0.5;
};

/// Constant + gust part; pure in t so tests can probe it directly.
Vec3 steady_wind(const WindConfig& cfg, double t);

class WindField {
 public:
  WindField(const WindConfig& cfg, std::uint64_t seed,
            double sample_hz = 500.0);

  /// Advance one tick and return the wind at time t.
  Vec3 step(double t);

 private:
  WindConfig cfg_;
  GaussianRng rng_;
  Lowpass3 filter_;
  double gain_{0.0};
  Vec3 turb_ = Vec3::Zero();
};

}  // namespace hoverwing
