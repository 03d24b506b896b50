#include "hoverwing/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hoverwing/svg_plot.hpp"

namespace hoverwing {
namespace {

constexpr double kDeg = M_PI / 180.0;

// Flight-calibrated coefficients for the default airframe, reproduced by
// the identify subcommand on a noiseless hover/cruise dataset.
constexpr double kSideslipC2 = -0.196;  // rad per m/s^2 of lateral force
constexpr double kSideslipB2 = 0.0;
constexpr double kFlapLiftGain = 2.15e-4;  // m/s^2 per unit of u2 - u1

bool finite_state(const PlantState& s) {
  return s.pos.allFinite() && s.vel.allFinite() && s.omega.allFinite() &&
         s.u.allFinite() && std::isfinite(s.q.w) && std::isfinite(s.q.x) &&
         std::isfinite(s.q.y) && std::isfinite(s.q.z);
}

std::string dump_state(const PlantState& s) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "t=%.4f pos=[%.3g %.3g %.3g] vel=[%.3g %.3g %.3g] "
                "omega=[%.3g %.3g %.3g] u=[%.3g %.3g %.3g %.3g]",
                s.t, s.pos(0), s.pos(1), s.pos(2), s.vel(0), s.vel(1),
                s.vel(2), s.omega(0), s.omega(1), s.omega(2), s.u(0), s.u(1),
                s.u(2), s.u(3));
  return buf;
}

LogRecord make_record(const Plant& plant, const SensorSnapshot& snap,
                      const ControlDebug& dbg, const Vec4& u_c,
                      const Vec3& wind, double gravity, double psi_prev) {
  const PlantState& s = plant.state();
  LogRecord r;
  r.t = s.t;
  r.pos_n = s.pos(0);
  r.pos_e = s.pos(1);
  r.pos_d = s.pos(2);
  r.vel_n = s.vel(0);
  r.vel_e = s.vel(1);
  r.vel_d = s.vel(2);
  r.qw = s.q.w;
  r.qx = s.q.x;
  r.qy = s.q.y;
  r.qz = s.q.z;
  const EulerZxy eta = euler_zxy_from_quat(s.q, psi_prev);
  r.phi = eta.phi;
  r.theta = eta.theta;
  r.psi = eta.psi;
  r.gyro_p = snap.gyro(0);
  r.gyro_q = snap.gyro(1);
  r.gyro_r = snap.gyro(2);
  r.f_x = snap.accel_body(0);
  r.f_y = snap.accel_body(1);
  r.f_z = snap.accel_body(2);
  const Vec3 acc =
      snap.q.to_rotmat() * snap.accel_body + Vec3(0.0, 0.0, gravity);
  r.acc_n = acc(0);
  r.acc_e = acc(1);
  r.acc_d = acc(2);
  r.acc_f_n = dbg.outer.xi_ddot_f(0);
  r.acc_f_e = dbg.outer.xi_ddot_f(1);
  r.acc_f_d = dbg.outer.xi_ddot_f(2);
  r.acc_c_n = dbg.outer.xi_ddot_comp(0);
  r.acc_c_e = dbg.outer.xi_ddot_comp(1);
  r.acc_c_d = dbg.outer.xi_ddot_comp(2);
  r.acc_ref_n = dbg.guidance.accel_ref(0);
  r.acc_ref_e = dbg.guidance.accel_ref(1);
  r.acc_ref_d = dbg.guidance.accel_ref(2);
  r.phi_ref = dbg.setpoint.phi;
  r.theta_ref = dbg.setpoint.theta;
  r.psi_ref = dbg.psi_ref;
  r.psi_dot_ref = dbg.psi_dot_ref;
  r.beta = dbg.beta;
  r.f_y_f = dbg.f_y_f;
  r.thrust_ref_inc = dbg.setpoint.dT;
  r.t_spec_f = dbg.attitude.t_f;
  r.u_cmd_0 = u_c(0);
  r.u_cmd_1 = u_c(1);
  r.u_cmd_2 = u_c(2);
  r.u_cmd_3 = u_c(3);
  r.u_est_0 = dbg.attitude.u_f(0);
  r.u_est_1 = dbg.attitude.u_f(1);
  r.u_est_2 = dbg.attitude.u_f(2);
  r.u_est_3 = dbg.attitude.u_f(3);
  r.u_act_0 = s.u(0);
  r.u_act_1 = s.u(1);
  r.u_act_2 = s.u(2);
  r.u_act_3 = s.u(3);
  r.omega_ref_p = dbg.attitude.omega_ref(0);
  r.omega_ref_q = dbg.attitude.omega_ref(1);
  r.omega_ref_r = dbg.attitude.omega_ref(2);
  r.omega_dot_f_p = dbg.attitude.omega_dot_f(0);
  r.omega_dot_f_q = dbg.attitude.omega_dot_f(1);
  r.omega_dot_f_r = dbg.attitude.omega_dot_f(2);
  r.airspeed = snap.airspeed;
  r.airspeed_valid = snap.airspeed_valid ? 1.0 : 0.0;
  r.alpha = plant.alpha(s, wind);
  r.wind_n = wind(0);
  r.wind_e = wind(1);
  r.wind_d = wind(2);
  r.guidance_mode = dbg.guidance.mode == TurnMode::kFixedWingTurn ? 1.0 : 0.0;
  r.turn_engaged = dbg.guidance.turn_engaged ? 1.0 : 0.0;
  r.element_index = dbg.guidance.element_index;
  r.on_line = dbg.guidance.on_line ? 1.0 : 0.0;
  int mask = 0;
  for (int i = 0; i < 4; ++i) {
    if (dbg.attitude.saturated[i]) mask |= 1 << i;
  }
  r.sat_mask = mask;
  r.motor_floor = dbg.attitude.motor_floor;
  r.thrust_gate = dbg.attitude.thrust_pitch_gate ? 1.0 : 0.0;
  r.near_singular = dbg.outer.near_singular ? 1.0 : 0.0;
  r.fault = (dbg.attitude.fault || dbg.outer.fault) ? 1.0 : 0.0;
  r.cross_track = dbg.guidance.cross_track;
  r.lambda_field = dbg.guidance.lambda;
  r.v_desired = dbg.guidance.v_desired;
  r.k_eta_pitch = dbg.attitude.k_eta(1);
  return r;
}

PlanElement hover_el(const Vec3& p, double heading_deg, double hold_s) {
  PlanElement e;
  e.type = ElementType::kHover;
  e.point = p;
  e.heading = heading_deg * kDeg;
  e.hold_s = hold_s;
  return e;
}

PlanElement goto_el(const Vec3& p, double speed) {
  PlanElement e;
  e.type = ElementType::kGotoWaypoint;
  e.point = p;
  e.speed = speed;
  return e;
}

PlanElement line_el(const Vec3& a, const Vec3& b, double speed) {
  PlanElement e;
  e.type = ElementType::kFollowLine;
  e.point = a;
  e.end = b;
  e.speed = speed;
  return e;
}

/// Default controller with the flight-calibrated coefficients applied.
ControllerConfig calibrated_controller() {
  ControllerConfig cfg;
  cfg.heading.coeffs.c2 = kSideslipC2;
  cfg.heading.coeffs.b2 = kSideslipB2;
  cfg.outer.g_flap = kFlapLiftGain;
  return cfg;
}

ScenarioSpec base_scenario(const std::string& name, const Vec3& start) {
  ScenarioSpec spec;
  spec.name = name;
  spec.controller = calibrated_controller();
  spec.initial.pos = start;
  return spec;
}

}  // namespace

RunResult run_scenario(const ScenarioSpec& spec, const RunOptions& opts) {
  RunResult res;
  const double fs = spec.controller.attitude.sample_hz;
  const double dt = 1.0 / fs;
  const int steps = static_cast<int>(std::lround(spec.duration_s * fs));
  const double gravity = spec.controller.outer.schedule.gravity;

  Plant plant(spec.setup.plant, fs);
  PlantState init = spec.initial;
  const double hover_u = plant.hover_motor_cmd();
  init.u = Vec4(0.0, 0.0, hover_u, hover_u);
  init.t = 0.0;
  plant.reset(init);

  SensorSuite sensors(spec.setup.sensors, spec.seed, fs);
  sensors.reset(init);
  WindField wind(spec.wind, spec.seed + 0x9e3779b97f4a7c15ull, fs);
  Controller ctl(spec.controller, spec.plan);

  Vec4 u_c = init.u;
  double psi_prev = euler_zxy_from_quat(init.q, 0.0).psi;
  res.records.reserve(steps);

  for (int k = 0; k < steps; ++k) {
    const Vec3 w = wind.step(plant.state().t);
    const SensorSnapshot snap = sensors.sense(plant, w);
    if (k == 0) ctl.reset(snap, u_c);

    ControlDebug dbg;
    u_c = ctl.step(snap, &dbg);

    const LogRecord r =
        make_record(plant, snap, dbg, u_c, w, gravity, psi_prev);
    psi_prev = r.psi;
    res.records.push_back(r);

    if (!u_c.allFinite()) {
      res.exit_code = 2;
      res.fault_message =
          "controller output is not finite; " + dump_state(plant.state());
      break;
    }
    plant.step(u_c, w);
    const PlantState& s = plant.state();
    if (!finite_state(s) || s.pos.norm() > 1e6 || s.vel.norm() > 1e4) {
      res.exit_code = 2;
      res.fault_message = "plant state diverged; " + dump_state(s);
      break;
    }
  }
  (void)dt;

  res.summary = summarize(res.records);

  namespace fs_ = std::filesystem;
  if (opts.write_log || opts.write_summary || opts.write_plots) {
    std::error_code ec;
    fs_::create_directories(opts.output_dir, ec);
  }
  if (opts.write_log) {
    const std::string path =
        (fs_::path(opts.output_dir) / (spec.name + "_log.csv")).string();
    LogWriter writer(path);
    if (writer.ok()) {
      for (const LogRecord& r : res.records) writer.write(r);
      writer.close();
      res.log_path = path;
    } else if (res.exit_code == 0) {
      res.exit_code = 1;
      res.fault_message = "cannot write " + path;
    }
  }
  if (opts.write_summary) {
    const std::string path =
        (fs_::path(opts.output_dir) / (spec.name + "_summary.json")).string();
    std::ofstream out(path);
    if (out) {
      out << summary_to_json(res.summary) << "\n";
      res.summary_path = path;
    } else if (res.exit_code == 0) {
      res.exit_code = 1;
      res.fault_message = "cannot write " + path;
    }
  }
  if (opts.write_plots) {
    res.plot_paths = write_standard_plots(opts.output_dir, spec.name,
                                          res.records);
  }
  if (!opts.keep_records) res.records.clear();
  return res;
}

std::vector<std::string> preset_names() {
  return {"hover",      "gust_hover", "transition",
          "shuttle",    "polygon",    "turn_sharp",
          "turn_equal", "tailwind_stop", "windy_shuttle"};
}

bool is_preset(const std::string& name) {
  const auto names = preset_names();
  for (const auto& n : names) {
    if (n == name) return true;
  }
  return false;
}

ScenarioSpec preset_scenario(const std::string& name) {
  if (name == "hover") {
    // Stationkeeping baseline.
    ScenarioSpec spec = base_scenario(name, Vec3(0.0, 0.0, -30.0));
    spec.duration_s = 30.0;
    spec.plan.elements = {hover_el(Vec3(0.0, 0.0, -30.0), 0.0, -1.0)};
    return spec;
  }
  if (name == "gust_hover") {
    // 1-cosine 6 m/s gust from the north while holding position.
    ScenarioSpec spec = base_scenario(name, Vec3(0.0, 0.0, -30.0));
    spec.duration_s = 30.0;
    spec.wind.gust.t0 = 10.0;
    spec.wind.gust.duration = 4.0;
    spec.wind.gust.peak = 6.0;
    spec.wind.gust.dir = Vec3(-1.0, 0.0, 0.0);
    spec.plan.elements = {hover_el(Vec3(0.0, 0.0, -30.0), 0.0, -1.0)};
    return spec;
  }
  if (name == "transition") {
    // Gentle hover-to-cruise-to-hover over a 400 m leg.
    ScenarioSpec spec = base_scenario(name, Vec3(0.0, 0.0, -40.0));
    spec.duration_s = 60.0;
    spec.controller.guidance.a_max = 1.0;
    spec.plan.elements = {hover_el(Vec3(0.0, 0.0, -40.0), 0.0, 3.0),
                          goto_el(Vec3(400.0, 0.0, -40.0), 16.0),
                          hover_el(Vec3(400.0, 0.0, -40.0), 0.0, -1.0)};
    return spec;
  }
  if (name == "shuttle" || name == "windy_shuttle") {
    // Out-and-back cruise along the east axis with full stops at both ends.
    ScenarioSpec spec = base_scenario(name, Vec3(0.0, 0.0, -30.0));
    spec.duration_s = 90.0;
    spec.plan.elements = {hover_el(Vec3(0.0, 0.0, -30.0), 0.0, 3.0),
                          goto_el(Vec3(0.0, 220.0, -30.0), 16.0),
                          hover_el(Vec3(0.0, 220.0, -30.0), 0.0, 5.0),
                          goto_el(Vec3(0.0, 0.0, -30.0), 16.0),
                          hover_el(Vec3(0.0, 0.0, -30.0), 0.0, -1.0)};
    if (name == "windy_shuttle") {
      spec.wind.speed = 6.7;
      spec.wind.from_deg = -70.0;
      spec.wind.turb_sigma = 0.5;
    }
    return spec;
  }
  if (name == "polygon") {
    // Rectangle at 16 m/s. The corner turns are bank-limited through the
    // a_max accel cap (6 m/s^2 ~ 31 deg, 43 m radius), so legs are sized
    // to recapture the line well before the next corner.
    ScenarioSpec spec = base_scenario(name, Vec3(0.0, 0.0, -40.0));
    spec.duration_s = 130.0;
    spec.controller.guidance.a_max = 6.0;
    const double z = -40.0;
    spec.plan.elements = {
        hover_el(Vec3(0.0, 0.0, z), 0.0, 3.0),
        line_el(Vec3(0.0, 0.0, z), Vec3(400.0, 0.0, z), 16.0),
        line_el(Vec3(400.0, 0.0, z), Vec3(400.0, 250.0, z), 16.0),
        line_el(Vec3(400.0, 250.0, z), Vec3(0.0, 250.0, z), 16.0),
        line_el(Vec3(0.0, 250.0, z), Vec3(0.0, 0.0, z), 16.0),
        hover_el(Vec3(0.0, 0.0, z), 0.0, -1.0)};
    return spec;
  }
  if (name == "turn_sharp" || name == "turn_equal") {
    // Racetrack 180: the pitch gain either stays at its hover value
    // through the turn or is equalized with roll above cruise speed.
    // a_max = 6 makes the turn a sustained ~31 deg bank.
    ScenarioSpec spec = base_scenario(name, Vec3(0.0, 0.0, -40.0));
    spec.duration_s = 80.0;
    spec.controller.guidance.a_max = 6.0;
    spec.controller.attitude.gains.equalize_in_cruise = (name == "turn_equal");
    const double z = -40.0;
    spec.plan.elements = {
        hover_el(Vec3(0.0, 0.0, z), 0.0, 3.0),
        line_el(Vec3(0.0, 0.0, z), Vec3(350.0, 0.0, z), 16.0),
        line_el(Vec3(350.0, 80.0, z), Vec3(0.0, 80.0, z), 16.0),
        hover_el(Vec3(0.0, 80.0, z), 180.0, -1.0)};
    return spec;
  }
  if (name == "tailwind_stop") {
    // Arrive downwind: 8 m/s pushing from behind during the decelerating
    // approach to a hover point.
    ScenarioSpec spec = base_scenario(name, Vec3(0.0, 0.0, -30.0));
    spec.duration_s = 45.0;
    spec.wind.speed = 8.0;
    spec.wind.from_deg = 180.0;  // from the south, mission flies north
    spec.plan.elements = {hover_el(Vec3(0.0, 0.0, -30.0), 0.0, 3.0),
                          goto_el(Vec3(150.0, 0.0, -30.0), 16.0),
                          hover_el(Vec3(150.0, 0.0, -30.0), 0.0, -1.0)};
    return spec;
  }
  throw ConfigError("unknown preset \"" + name + "\"; available: " + [] {
    std::string all;
    for (const auto& n : preset_names()) {
      if (!all.empty()) all += ", ";
      all += n;
    }
    return all;
  }());
}

}  // namespace hoverwing
