#include "hoverwing/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hoverwing {
namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr double kDeg = M_PI / 180.0;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void assign(const json& j, const std::string& where, double& out) {
  if (!j.is_number()) fail(where, "expected a number");
  out = j.get<double>();
}

void assign(const json& j, const std::string& where, int& out) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  out = j.get<int>();
}

void assign(const json& j, const std::string& where, std::uint64_t& out) {
  if (!j.is_number_unsigned() && !j.is_number_integer())
    fail(where, "expected a non-negative integer");
  const auto v = j.get<std::int64_t>();
  if (v < 0) fail(where, "expected a non-negative integer");
  out = static_cast<std::uint64_t>(v);
}

void assign(const json& j, const std::string& where, bool& out) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  out = j.get<bool>();
}

void assign(const json& j, const std::string& where, std::string& out) {
  if (!j.is_string()) fail(where, "expected a string");
  out = j.get<std::string>();
}

template <typename Vec>
void assign_vec(const json& j, const std::string& where, Vec& out) {
  const int n = static_cast<int>(out.size());
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    fail(where, "expected an array of " + std::to_string(n) + " numbers");
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number())
      fail(where + "[" + std::to_string(i) + "]", "expected a number");
    out(i) = j[i].get<double>();
  }
}

void assign(const json& j, const std::string& where, Vec3& out) {
  assign_vec(j, where, out);
}
void assign(const json& j, const std::string& where, Vec4& out) {
  assign_vec(j, where, out);
}

/// Reads known keys out of one JSON object and rejects the rest, so a
/// typo fails loudly instead of silently keeping a default.
class ObjReader {
 public:
  ObjReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail(where_, "expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    assign(*it, where_ + "." + key, out);
  }

  /// Angle stored in degrees, struct field in radians.
  void get_deg(const char* key, double& out_rad) {
    double deg = out_rad / kDeg;
    get(key, deg);
    out_rad = deg * kDeg;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key()))
        fail(where_ + "." + it.key(), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void check_header(ObjReader& r, const char* expected_kind) {
  int schema = kSchemaVersion;
  r.get("schema", schema);
  if (schema != kSchemaVersion)
    fail(r.where("schema"),
         "unsupported version " + std::to_string(schema) + ", expected " +
             std::to_string(kSchemaVersion));
  std::string kind = expected_kind;
  r.get("kind", kind);
  if (kind != expected_kind)
    fail(r.where("kind"), "expected \"" + std::string(expected_kind) + "\"");
}

// --- vehicle ---------------------------------------------------------------

void read_inner_schedule(const json& j, const std::string& where,
                         InnerScheduleParams& s) {
  ObjReader r(j, where);
  r.get("pitch_hover", s.pitch_hover);
  r.get("pitch_fwd", s.pitch_fwd);
  r.get("pitch_a", s.pitch_a);
  r.get("pitch_b", s.pitch_b);
  r.get("yaw_hover", s.yaw_hover);
  r.get("yaw_fwd", s.yaw_fwd);
  r.get("yaw_a", s.yaw_a);
  r.get("yaw_b", s.yaw_b);
  r.get("ramp_start_deg", s.ramp_start_deg);
  r.get("ramp_end_deg", s.ramp_end_deg);
  r.get("motor_roll_k", s.motor_roll_k);
  r.get("motor_thrust", s.motor_thrust);
  r.get("thrust_pitch", s.thrust_pitch);
  r.get("flap_gate", s.flap_gate);
  r.get("units_per_pct_thrust", s.units_per_pct_thrust);
  r.get("airspeed_measurable", s.airspeed_measurable);
  r.get("floor_low_frac", s.floor_low_frac);
  r.get("floor_high_frac", s.floor_high_frac);
  r.get("floor_speed", s.floor_speed);
  r.finish();
}

void read_outer_schedule(const json& j, const std::string& where,
                         OuterScheduleParams& s) {
  ObjReader r(j, where);
  r.get("mass", s.mass);
  r.get("gravity", s.gravity);
  r.get("slope_hover", s.slope_hover);
  r.get("slope_gain", s.slope_gain);
  r.get("slope_v0", s.slope_v0);
  r.get("slope_speed_switch", s.slope_speed_switch);
  r.get("ramp_start_deg", s.ramp_start_deg);
  r.get("ramp_end_deg", s.ramp_end_deg);
  r.get("cos_phi_correction", s.cos_phi_correction);
  r.finish();
}

void read_attitude(const json& j, const std::string& where,
                   AttitudeIndiParams& p) {
  ObjReader r(j, where);
  r.get("sample_hz", p.sample_hz);
  r.get("signal_cutoff_hz", p.signal_cutoff_hz);
  if (const json* g = r.child("gains")) {
    ObjReader rg(*g, r.where("gains"));
    rg.get("k_eta_roll", p.gains.k_eta_roll);
    rg.get("k_eta_pitch", p.gains.k_eta_pitch);
    rg.get("k_eta_yaw", p.gains.k_eta_yaw);
    rg.get("k_omega", p.gains.k_omega);
    rg.get("equalize_in_cruise", p.gains.equalize_in_cruise);
    rg.get("equalize_speed", p.gains.equalize_speed);
    rg.get("equalize_hysteresis", p.gains.equalize_hysteresis);
    rg.finish();
  }
  if (const json* s = r.child("schedule"))
    read_inner_schedule(*s, r.where("schedule"), p.schedule);
  if (const json* a = r.child("allocation")) {
    ObjReader ra(*a, r.where("allocation"));
    ra.get("weights", p.allocation_weights);
    ra.get("gamma", p.allocation_gamma);
    ra.get("iterations", p.allocation_iterations);
    ra.finish();
  }
  if (const json* a = r.child("actuators")) {
    ObjReader ra(*a, r.where("actuators"));
    ra.get("flap_pole", p.flap_pole);
    ra.get("flap_rate_limit", p.flap_rate_limit);
    ra.get("motor_pole", p.motor_pole);
    ra.finish();
  }
  r.finish();
}

void read_outer(const json& j, const std::string& where, OuterLoopParams& p) {
  ObjReader r(j, where);
  r.get("sample_hz", p.sample_hz);
  r.get("rate_divider", p.rate_divider);
  r.get("signal_cutoff_hz", p.signal_cutoff_hz);
  if (const json* s = r.child("schedule"))
    read_outer_schedule(*s, r.where("schedule"), p.schedule);
  r.get("compensator_enabled", p.compensator_enabled);
  r.get("g_flap", p.g_flap);
  r.get("comp_cutoff_hz", p.comp_cutoff_hz);
  r.get("pitch_eff_scale", p.pitch_eff_scale);
  r.get("cond_limit", p.cond_limit);
  r.finish();
}

void read_heading(const json& j, const std::string& where,
                  HeadingRefParams& p) {
  ObjReader r(j, where);
  r.get("c2", p.coeffs.c2);
  r.get("b2", p.coeffs.b2);
  r.get("k_beta", p.k_beta);
  r.get("fy_cutoff_hz", p.fy_cutoff_hz);
  r.finish();
}

void read_guidance(const json& j, const std::string& where, GuidanceGains& g) {
  ObjReader r(j, where);
  r.get("k_xi", g.k_xi);
  r.get("k_xi_dot", g.k_xi_dot);
  r.get("a_max", g.a_max);
  r.get("turn_speed_current", g.turn_speed_current);
  r.get("turn_speed_desired", g.turn_speed_desired);
  r.get("turn_gain", g.turn_gain);
  r.get_deg("turn_deadband_deg", g.turn_deadband_rad);
  r.get("approach_limit", g.approach_limit);
  r.get("line_switch_dist", g.line_switch_dist);
  r.get("wp_accept_radius", g.wp_accept_radius);
  r.get("hover_accept_radius", g.hover_accept_radius);
  r.get("hover_speed_max", g.hover_speed_max);
  r.get("default_speed", g.default_speed);
  r.finish();
}

ControllerConfig read_vehicle(const json& j, const std::string& where) {
  ControllerConfig cfg;
  ObjReader r(j, where);
  check_header(r, "vehicle");
  if (const json* a = r.child("attitude"))
    read_attitude(*a, r.where("attitude"), cfg.attitude);
  if (const json* o = r.child("outer"))
    read_outer(*o, r.where("outer"), cfg.outer);
  if (const json* h = r.child("heading"))
    read_heading(*h, r.where("heading"), cfg.heading);
  if (const json* g = r.child("guidance"))
    read_guidance(*g, r.where("guidance"), cfg.guidance);
  r.get_deg("psi_slew_rate_deg", cfg.psi_slew_rate);
  r.finish();
  // Loops share one clock and one gravity constant.
  cfg.outer.sample_hz = cfg.attitude.sample_hz;
  cfg.heading.sample_hz = cfg.attitude.sample_hz;
  cfg.heading.gravity = cfg.outer.schedule.gravity;
  return cfg;
}

json write_vehicle(const ControllerConfig& cfg) {
  json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "vehicle";
  const AttitudeIndiParams& p = cfg.attitude;
  j["attitude"] = {
      {"sample_hz", p.sample_hz},
      {"signal_cutoff_hz", p.signal_cutoff_hz},
      {"gains",
       {{"k_eta_roll", p.gains.k_eta_roll},
        {"k_eta_pitch", p.gains.k_eta_pitch},
        {"k_eta_yaw", p.gains.k_eta_yaw},
        {"k_omega", {p.gains.k_omega(0), p.gains.k_omega(1), p.gains.k_omega(2)}},
        {"equalize_in_cruise", p.gains.equalize_in_cruise},
        {"equalize_speed", p.gains.equalize_speed},
        {"equalize_hysteresis", p.gains.equalize_hysteresis}}},
      {"schedule",
       {{"pitch_hover", p.schedule.pitch_hover},
        {"pitch_fwd", p.schedule.pitch_fwd},
        {"pitch_a", p.schedule.pitch_a},
        {"pitch_b", p.schedule.pitch_b},
        {"yaw_hover", p.schedule.yaw_hover},
        {"yaw_fwd", p.schedule.yaw_fwd},
        {"yaw_a", p.schedule.yaw_a},
        {"yaw_b", p.schedule.yaw_b},
        {"ramp_start_deg", p.schedule.ramp_start_deg},
        {"ramp_end_deg", p.schedule.ramp_end_deg},
        {"motor_roll_k", p.schedule.motor_roll_k},
        {"motor_thrust", p.schedule.motor_thrust},
        {"thrust_pitch", p.schedule.thrust_pitch},
        {"flap_gate", p.schedule.flap_gate},
        {"units_per_pct_thrust", p.schedule.units_per_pct_thrust},
        {"airspeed_measurable", p.schedule.airspeed_measurable},
        {"floor_low_frac", p.schedule.floor_low_frac},
        {"floor_high_frac", p.schedule.floor_high_frac},
        {"floor_speed", p.schedule.floor_speed}}},
      {"allocation",
       {{"weights",
         {p.allocation_weights(0), p.allocation_weights(1),
          p.allocation_weights(2), p.allocation_weights(3)}},
        {"gamma", p.allocation_gamma},
        {"iterations", p.allocation_iterations}}},
      {"actuators",
       {{"flap_pole", p.flap_pole},
        {"flap_rate_limit", p.flap_rate_limit},
        {"motor_pole", p.motor_pole}}}};
  const OuterLoopParams& o = cfg.outer;
  j["outer"] = {{"sample_hz", o.sample_hz},
                {"rate_divider", o.rate_divider},
                {"signal_cutoff_hz", o.signal_cutoff_hz},
                {"schedule",
                 {{"mass", o.schedule.mass},
                  {"gravity", o.schedule.gravity},
                  {"slope_hover", o.schedule.slope_hover},
                  {"slope_gain", o.schedule.slope_gain},
                  {"slope_v0", o.schedule.slope_v0},
                  {"slope_speed_switch", o.schedule.slope_speed_switch},
                  {"ramp_start_deg", o.schedule.ramp_start_deg},
                  {"ramp_end_deg", o.schedule.ramp_end_deg},
                  {"cos_phi_correction", o.schedule.cos_phi_correction}}},
                {"compensator_enabled", o.compensator_enabled},
                {"g_flap", o.g_flap},
                {"comp_cutoff_hz", o.comp_cutoff_hz},
                {"pitch_eff_scale", o.pitch_eff_scale},
                {"cond_limit", o.cond_limit}};
  j["heading"] = {{"c2", cfg.heading.coeffs.c2},
                  {"b2", cfg.heading.coeffs.b2},
                  {"k_beta", cfg.heading.k_beta},
                  {"fy_cutoff_hz", cfg.heading.fy_cutoff_hz}};
  const GuidanceGains& g = cfg.guidance;
  j["guidance"] = {{"k_xi", g.k_xi},
                   {"k_xi_dot", g.k_xi_dot},
                   {"a_max", g.a_max},
                   {"turn_speed_current", g.turn_speed_current},
                   {"turn_speed_desired", g.turn_speed_desired},
                   {"turn_gain", g.turn_gain},
                   {"turn_deadband_deg", g.turn_deadband_rad / kDeg},
                   {"approach_limit", g.approach_limit},
                   {"line_switch_dist", g.line_switch_dist},
                   {"wp_accept_radius", g.wp_accept_radius},
                   {"hover_accept_radius", g.hover_accept_radius},
                   {"hover_speed_max", g.hover_speed_max},
                   {"default_speed", g.default_speed}};
  j["psi_slew_rate_deg"] = cfg.psi_slew_rate / kDeg;
  return j;
}

// --- plant -----------------------------------------------------------------

PlantSetup read_plant(const json& j, const std::string& where) {
  PlantSetup setup;
  ObjReader r(j, where);
  check_header(r, "plant");
  if (const json* pj = r.child("plant")) {
    PlantParams& p = setup.plant;
    ObjReader rp(*pj, r.where("plant"));
    rp.get("mass", p.mass);
    rp.get("gravity", p.gravity);
    rp.get("air_density", p.air_density);
    rp.get("inertia", p.inertia);
    rp.get("chord", p.chord);
    rp.get("area", p.area);
    rp.get("k_thrust", p.k_thrust);
    rp.get("motor_arm", p.motor_arm);
    rp.get("k_motor_yaw", p.k_motor_yaw);
    rp.get("motor_pole", p.motor_pole);
    rp.get("flap_arm_y", p.flap_arm_y);
    rp.get("flap_arm_z", p.flap_arm_z);
    rp.get("k_flap", p.k_flap);
    rp.get("k_wash", p.k_wash);
    rp.get("flap_pole", p.flap_pole);
    rp.get("flap_rate_limit", p.flap_rate_limit);
    rp.get("lift_slope", p.lift_slope);
    rp.get("cd0", p.cd0);
    rp.get("induced_k", p.induced_k);
    rp.get("stall_start_deg", p.stall_start_deg);
    rp.get("stall_end_deg", p.stall_end_deg);
    rp.get("post_stall_cl", p.post_stall_cl);
    rp.get("plate_cd", p.plate_cd);
    rp.get("cn0", p.cn0);
    rp.get("cp_shift", p.cp_shift);
    rp.get("side_force_c", p.side_force_c);
    rp.get("rot_damping", p.rot_damping);
    rp.finish();
  }
  if (const json* sj = r.child("sensors")) {
    SensorParams& s = setup.sensors;
    ObjReader rs(*sj, r.where("sensors"));
    rs.get("sigma_gyro", s.sigma_gyro);
    rs.get("sigma_accel", s.sigma_accel);
    rs.get("sigma_pitot", s.sigma_pitot);
    rs.get("sigma_pos", s.sigma_pos);
    rs.get("sigma_vel", s.sigma_vel);
    rs.get("gnss_rate_hz", s.gnss_rate_hz);
    rs.get("gnss_latency_s", s.gnss_latency_s);
    rs.get("pitot_min_speed", s.pitot_min_speed);
    rs.get("pitot_max_alpha_deg", s.pitot_max_alpha_deg);
    rs.get("noiseless", s.noiseless);
    rs.finish();
  }
  r.finish();
  return setup;
}

json write_plant(const PlantSetup& setup) {
  const PlantParams& p = setup.plant;
  const SensorParams& s = setup.sensors;
  json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "plant";
  j["plant"] = {{"mass", p.mass},
                {"gravity", p.gravity},
                {"air_density", p.air_density},
                {"inertia", {p.inertia(0), p.inertia(1), p.inertia(2)}},
                {"chord", p.chord},
                {"area", p.area},
                {"k_thrust", p.k_thrust},
                {"motor_arm", p.motor_arm},
                {"k_motor_yaw", p.k_motor_yaw},
                {"motor_pole", p.motor_pole},
                {"flap_arm_y", p.flap_arm_y},
                {"flap_arm_z", p.flap_arm_z},
                {"k_flap", p.k_flap},
                {"k_wash", p.k_wash},
                {"flap_pole", p.flap_pole},
                {"flap_rate_limit", p.flap_rate_limit},
                {"lift_slope", p.lift_slope},
                {"cd0", p.cd0},
                {"induced_k", p.induced_k},
                {"stall_start_deg", p.stall_start_deg},
                {"stall_end_deg", p.stall_end_deg},
                {"post_stall_cl", p.post_stall_cl},
                {"plate_cd", p.plate_cd},
                {"cn0", p.cn0},
                {"cp_shift", p.cp_shift},
                {"side_force_c", p.side_force_c},
                {"rot_damping",
                 {p.rot_damping(0), p.rot_damping(1), p.rot_damping(2)}}};
  j["sensors"] = {{"sigma_gyro", s.sigma_gyro},
                  {"sigma_accel", s.sigma_accel},
                  {"sigma_pitot", s.sigma_pitot},
                  {"sigma_pos", s.sigma_pos},
                  {"sigma_vel", s.sigma_vel},
                  {"gnss_rate_hz", s.gnss_rate_hz},
                  {"gnss_latency_s", s.gnss_latency_s},
                  {"pitot_min_speed", s.pitot_min_speed},
                  {"pitot_max_alpha_deg", s.pitot_max_alpha_deg},
                  {"noiseless", s.noiseless}};
  return j;
}

// --- scenario --------------------------------------------------------------

PlanElement read_element(const json& j, const std::string& where) {
  PlanElement e;
  ObjReader r(j, where);
  std::string type;
  r.get("type", type);
  if (type == "hover") {
    e.type = ElementType::kHover;
    r.get("point", e.point);
    double heading_deg = 0.0;
    r.get("heading_deg", heading_deg);
    e.heading = heading_deg * kDeg;
    r.get("hold_s", e.hold_s);
  } else if (type == "goto") {
    e.type = ElementType::kGotoWaypoint;
    r.get("point", e.point);
    r.get("speed", e.speed);
  } else if (type == "line") {
    e.type = ElementType::kFollowLine;
    r.get("start", e.point);
    r.get("end", e.end);
    r.get("speed", e.speed);
  } else {
    fail(r.where("type"), "expected \"hover\", \"goto\" or \"line\"");
  }
  r.finish();
  return e;
}

json write_element(const PlanElement& e) {
  json j;
  switch (e.type) {
    case ElementType::kHover:
      j["type"] = "hover";
      j["point"] = {e.point(0), e.point(1), e.point(2)};
      j["heading_deg"] = e.heading / kDeg;
      j["hold_s"] = e.hold_s;
      break;
    case ElementType::kGotoWaypoint:
      j["type"] = "goto";
      j["point"] = {e.point(0), e.point(1), e.point(2)};
      j["speed"] = e.speed;
      break;
    case ElementType::kFollowLine:
      j["type"] = "line";
      j["start"] = {e.point(0), e.point(1), e.point(2)};
      j["end"] = {e.end(0), e.end(1), e.end(2)};
      j["speed"] = e.speed;
      break;
  }
  return j;
}

void read_wind(const json& j, const std::string& where, WindConfig& w) {
  ObjReader r(j, where);
  r.get("speed", w.speed);
  r.get("from_deg", w.from_deg);
  if (const json* g = r.child("gust")) {
    ObjReader rg(*g, r.where("gust"));
    rg.get("t0", w.gust.t0);
    rg.get("duration", w.gust.duration);
    rg.get("peak", w.gust.peak);
    rg.get("dir", w.gust.dir);
    rg.finish();
  }
  r.get("turb_sigma", w.turb_sigma);
  r.get("turb_cutoff_hz", w.turb_cutoff_hz);
  r.finish();
}

json write_wind(const WindConfig& w) {
  return json{{"speed", w.speed},
              {"from_deg", w.from_deg},
              {"gust",
               {{"t0", w.gust.t0},
                {"duration", w.gust.duration},
                {"peak", w.gust.peak},
                {"dir", {w.gust.dir(0), w.gust.dir(1), w.gust.dir(2)}}}},
              {"turb_sigma", w.turb_sigma},
              {"turb_cutoff_hz", w.turb_cutoff_hz}};
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(path, e.what());
  }
  return j;
}

ScenarioSpec read_scenario(const json& j, const std::string& where,
                           const std::filesystem::path& base_dir) {
  ScenarioSpec spec;
  ObjReader r(j, where);
  check_header(r, "scenario");
  r.get("name", spec.name);
  r.get("duration_s", spec.duration_s);
  r.get("seed", spec.seed);

  // Vehicle/plant: inline object or a path relative to the scenario file.
  if (const json* v = r.child("vehicle")) {
    if (v->is_string()) {
      const auto p = base_dir / v->get<std::string>();
      spec.controller = read_vehicle(parse_file(p.string()), p.string());
    } else {
      spec.controller = read_vehicle(*v, r.where("vehicle"));
    }
  }
  if (const json* p = r.child("plant")) {
    if (p->is_string()) {
      const auto pp = base_dir / p->get<std::string>();
      spec.setup = read_plant(parse_file(pp.string()), pp.string());
    } else {
      spec.setup = read_plant(*p, r.where("plant"));
    }
  }
  if (const json* w = r.child("wind")) read_wind(*w, r.where("wind"), spec.wind);

  if (const json* ij = r.child("initial")) {
    ObjReader ri(*ij, r.where("initial"));
    ri.get("pos", spec.initial.pos);
    ri.get("vel", spec.initial.vel);
    double roll_deg = 0.0, pitch_deg = 0.0, yaw_deg = 0.0;
    ri.get("roll_deg", roll_deg);
    ri.get("pitch_deg", pitch_deg);
    ri.get("yaw_deg", yaw_deg);
    spec.initial.q = quat_from_euler_zxy(
        EulerZxy{roll_deg * kDeg, pitch_deg * kDeg, yaw_deg * kDeg});
    ri.finish();
  }

  if (const json* pj = r.child("plan")) {
    if (!pj->is_array()) fail(r.where("plan"), "expected an array");
    for (std::size_t i = 0; i < pj->size(); ++i) {
      spec.plan.elements.push_back(read_element(
          (*pj)[i], r.where("plan") + "[" + std::to_string(i) + "]"));
    }
  }
  r.finish();
  return spec;
}

json write_scenario(const ScenarioSpec& spec) {
  json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "scenario";
  j["name"] = spec.name;
  j["duration_s"] = spec.duration_s;
  j["seed"] = spec.seed;
  j["vehicle"] = write_vehicle(spec.controller);
  j["plant"] = write_plant(spec.setup);
  j["wind"] = write_wind(spec.wind);
  const EulerZxy e = euler_zxy_from_quat(spec.initial.q, 0.0);
  j["initial"] = {{"pos",
                   {spec.initial.pos(0), spec.initial.pos(1),
                    spec.initial.pos(2)}},
                  {"vel",
                   {spec.initial.vel(0), spec.initial.vel(1),
                    spec.initial.vel(2)}},
                  {"roll_deg", e.phi / kDeg},
                  {"pitch_deg", e.theta / kDeg},
                  {"yaw_deg", e.psi / kDeg}};
  j["plan"] = json::array();
  for (const PlanElement& el : spec.plan.elements)
    j["plan"].push_back(write_element(el));
  return j;
}

void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open file for writing");
  out << j.dump(2) << "\n";
  if (!out) fail(path, "write failed");
}

}  // namespace

ControllerConfig load_vehicle_config(const std::string& path) {
  return read_vehicle(parse_file(path), path);
}

PlantSetup load_plant_config(const std::string& path) {
  return read_plant(parse_file(path), path);
}

ScenarioSpec load_scenario_config(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path();
  return read_scenario(parse_file(path), path, base);
}

void save_vehicle_config(const std::string& path, const ControllerConfig& cfg) {
  write_file(path, write_vehicle(cfg));
}

void save_plant_config(const std::string& path, const PlantSetup& setup) {
  write_file(path, write_plant(setup));
}

void save_scenario_config(const std::string& path, const ScenarioSpec& spec) {
  write_file(path, write_scenario(spec));
}

std::vector<std::string> validate_config_file(const std::string& path) {
  std::vector<std::string> findings;
  json j;
  try {
    j = parse_file(path);
  } catch (const ConfigError& e) {
    findings.emplace_back(e.what());
    return findings;
  }
  std::string kind;
  if (j.is_object() && j.contains("kind") && j["kind"].is_string())
    kind = j["kind"].get<std::string>();

  try {
    if (kind == "vehicle") {
      const ControllerConfig cfg = read_vehicle(j, path);
      if (cfg.attitude.sample_hz <= 0.0)
        findings.push_back(path + ": attitude.sample_hz must be positive");
      if (cfg.attitude.signal_cutoff_hz * 2.0 >= cfg.attitude.sample_hz)
        findings.push_back(path + ": signal_cutoff_hz above Nyquist");
      if ((cfg.attitude.allocation_weights.array() <= 0.0).any())
        findings.push_back(path + ": allocation weights must be positive");
      if (cfg.attitude.allocation_iterations < 1)
        findings.push_back(path + ": allocation.iterations must be >= 1");
      if (cfg.outer.schedule.mass <= 0.0)
        findings.push_back(path + ": outer.schedule.mass must be positive");
      if (cfg.outer.rate_divider < 1)
        findings.push_back(path + ": outer.rate_divider must be >= 1");
      if (cfg.guidance.a_max <= 0.0)
        findings.push_back(path + ": guidance.a_max must be positive");
    } else if (kind == "plant") {
      const PlantSetup setup = read_plant(j, path);
      if (setup.plant.mass <= 0.0)
        findings.push_back(path + ": plant.mass must be positive");
      if ((setup.plant.inertia.array() <= 0.0).any())
        findings.push_back(path + ": plant.inertia must be positive");
      if (setup.plant.k_thrust <= 0.0)
        findings.push_back(path + ": plant.k_thrust must be positive");
      if (setup.sensors.gnss_rate_hz <= 0.0)
        findings.push_back(path + ": sensors.gnss_rate_hz must be positive");
    } else if (kind == "scenario") {
      const auto base = std::filesystem::path(path).parent_path();
      const ScenarioSpec spec = read_scenario(j, path, base);
      if (spec.duration_s <= 0.0)
        findings.push_back(path + ": duration_s must be positive");
      if (spec.plan.elements.empty())
        findings.push_back(path + ": plan has no elements");
      for (std::size_t i = 0; i < spec.plan.elements.size(); ++i) {
        const PlanElement& e = spec.plan.elements[i];
        if (e.type == ElementType::kFollowLine &&
            (e.end - e.point).head<2>().norm() < 1.0) {
          findings.push_back(path + ": plan[" + std::to_string(i) +
                             "] line is shorter than 1 m");
        }
        if (e.speed < 0.0)
          findings.push_back(path + ": plan[" + std::to_string(i) +
                             "] speed must be non-negative");
      }
      if (spec.wind.speed < 0.0)
        findings.push_back(path + ": wind.speed must be non-negative");
    } else {
      findings.push_back(path +
                         ": missing or unknown \"kind\" (expected "
                         "\"vehicle\", \"plant\" or \"scenario\")");
    }
  } catch (const ConfigError& e) {
    findings.emplace_back(e.what());
  }
  return findings;
}

}  // namespace hoverwing
