#pragma once

#include <vector>

#include "hoverwing/filters.hpp"

namespace hoverwing::testsupport {

// Scalar rate plant behind a first-order actuator, closed by the same
// filtered-increment law the attitude loop uses. Stripping the vehicle
// away isolates the increment algebra: convergence here depends only on
// filter sync, the actuator estimate and the effectiveness ratio.
struct MockIndiConfig {
  double sample_hz = 500.0;
  double g_plant = 2.0e-3;     // rad/s^2 per command unit
  double g_model_scale = 1.0;  // controller uses g_model_scale * g_plant
  double actuator_pole = 0.1;
  double k_omega = 28.0;
  double disturbance = 0.0;  // constant rad/s^2 on the plant
  double cutoff_hz = 5.0;
};

struct MockIndiTrace {
  std::vector<double> t;
  std::vector<double> omega;
  std::vector<double> error;  // omega_ref - omega
  std::vector<double> u_cmd;
};

inline MockIndiTrace run_mock_indi(const MockIndiConfig& cfg,
                                   double omega_ref, double duration_s) {
  const double dt = 1.0 / cfg.sample_hz;
  const double g_model = cfg.g_model_scale * cfg.g_plant;

  ActuatorModel servo;  // the physical actuator
  servo.pole = cfg.actuator_pole;
  servo.sample_hz = cfg.sample_hz;
  servo.reset(0.0);

  ActuatorModel servo_est;  // controller's copy, fed by its own commands
  servo_est.pole = cfg.actuator_pole;
  servo_est.sample_hz = cfg.sample_hz;
  servo_est.reset(0.0);

  Butter2Lowpass omega_filt(cfg.cutoff_hz, cfg.sample_hz);
  Butter2Lowpass u_filt(cfg.cutoff_hz, cfg.sample_hz);
  omega_filt.reset(0.0);
  u_filt.reset(0.0);

  double omega = 0.0;
  double omega_f_prev = 0.0;
  double u_cmd = 0.0;

  MockIndiTrace trace;
  const int n = static_cast<int>(duration_s * cfg.sample_hz);
  for (int i = 0; i < n; ++i) {
    // Controller tick: filter the measured rate, difference it, and add
    // the increment on top of the filtered actuator estimate.
    const double omega_f = omega_filt.step(omega).value_or(omega_f_prev);
    const double omega_dot_f = (omega_f - omega_f_prev) * cfg.sample_hz;
    omega_f_prev = omega_f;

    const double u_est = servo_est.state;
    const double u_f = u_filt.step(u_est).value_or(u_est);

    const double nu = cfg.k_omega * (omega_ref - omega);
    u_cmd = u_f + (nu - omega_dot_f) / g_model;
    servo_est.step(u_cmd);

    // Plant tick.
    const double u_act = servo.step(u_cmd);
    omega += dt * (cfg.g_plant * u_act + cfg.disturbance);

    trace.t.push_back(i * dt);
    trace.omega.push_back(omega);
    trace.error.push_back(omega_ref - omega);
    trace.u_cmd.push_back(u_cmd);
  }
  return trace;
}

}  // namespace hoverwing::testsupport
