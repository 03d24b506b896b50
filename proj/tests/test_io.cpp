#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hoverwing/config.hpp"
#include "hoverwing/frames.hpp"
#include "hoverwing/identification.hpp"
#include "hoverwing/log_schema.hpp"
#include "hoverwing/svg_plot.hpp"
#include "log_synth.hpp"

using namespace hoverwing;
namespace fs = std::filesystem;

namespace {

constexpr double kDeg = M_PI / 180.0;

// Scratch directory per test case, removed on scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("hoverwing_io_" + std::to_string(counter.fetch_add(1)) + "_" +
            std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const char* name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

template <typename Fn>
std::string caught_message(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("log: csv roundtrip preserves values and bytes") {
  TempDir tmp;

  std::vector<LogRecord> recs(3);
  recs[0].t = 0.002;
  recs[0].pos_n = -12345.6789;
  recs[0].qw = 1.0;
  recs[0].airspeed_valid = 1.0;
  recs[0].sat_mask = 5.0;
  recs[0].element_index = 2.0;
  recs[0].u_cmd_0 = -9600.0;
  recs[0].k_eta_pitch = 13.3;
  recs[1].t = 0.004;
  recs[1].theta = M_PI;          // not exact in 10 digits
  recs[1].phi = 0.125;           // exact
  recs[1].f_y = -3.0e-7;
  recs[2].t = 0.006;
  recs[2].cross_track = 1.0 / 3.0;

  const std::string pa = tmp.file("a.csv"), pb = tmp.file("b.csv");
  {
    LogWriter wa(pa);
    REQUIRE(wa.ok());
    for (const auto& r : recs) wa.write(r);
  }
  {
    LogWriter wb(pb);
    for (const auto& r : recs) wb.write(r);
  }
  CHECK(read_text(pa) == read_text(pb));

  // Header row is the full schema in declaration order.
  {
    std::ifstream in(pa);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("t,pos_n,pos_e,pos_d,vel_n", 0) == 0);
    const size_t commas =
        static_cast<size_t>(std::count(header.begin(), header.end(), ','));
    CHECK(commas + 1 == log_columns().size());
    CHECK(header.substr(header.rfind(',') + 1) == "k_eta_pitch");
  }

  const auto back = read_log(pa);
  REQUIRE(back.size() == 3);
  CHECK(back[0].t == 0.002);
  CHECK(back[0].pos_n == -12345.6789);
  CHECK(back[0].qw == 1.0);
  CHECK(back[0].airspeed_valid == 1.0);
  CHECK(back[0].sat_mask == 5.0);
  CHECK(back[0].element_index == 2.0);
  CHECK(back[0].u_cmd_0 == -9600.0);
  CHECK(back[0].k_eta_pitch == 13.3);
  CHECK(back[0].vel_n == 0.0);  // untouched fields stay default
  CHECK(back[1].phi == 0.125);
  CHECK(back[1].f_y == -3.0e-7);
  // %.10g keeps ten significant digits; irrationals come back close.
  CHECK(back[1].theta == doctest::Approx(M_PI).epsilon(1e-9));
  CHECK(back[2].cross_track == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("log: reader maps columns by name and rejects the unknown") {
  TempDir tmp;

  // Subset of columns in shuffled order is fine.
  const std::string swapped = tmp.file("swapped.csv");
  write_text(swapped, "theta,t\n0.5,1.25\n-0.25,1.5\n");
  const auto recs = read_log(swapped);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].theta == 0.5);
  CHECK(recs[0].t == 1.25);
  CHECK(recs[0].pos_n == 0.0);
  CHECK(recs[1].theta == -0.25);

  // Blank lines are skipped.
  const std::string gappy = tmp.file("gappy.csv");
  write_text(gappy, "t\n\n1\n\n2\n");
  CHECK(read_log(gappy).size() == 2);

  const std::string bogus = tmp.file("bogus.csv");
  write_text(bogus, "t,bogus\n1,2\n");
  CHECK(contains(caught_message([&] { read_log(bogus); }),
                 "unknown log column 'bogus'"));

  const std::string empty = tmp.file("empty.csv");
  write_text(empty, "");
  CHECK(contains(caught_message([&] { read_log(empty); }), "empty log"));

  const std::string bad = tmp.file("bad.csv");
  write_text(bad, "t\nxyz\n");
  CHECK(contains(caught_message([&] { read_log(bad); }), "bad number"));

  CHECK(contains(caught_message([&] { read_log(tmp.file("missing.csv")); }),
                 "cannot open log"));
}

TEST_CASE("log: summary metrics from a hand-built run") {
  std::vector<LogRecord> recs(4);
  const double psi_wrap = wrap_pi(3.1 - (-3.1));  // crosses the seam

  for (size_t i = 0; i < 4; ++i) {
    LogRecord& r = recs[i];
    r.t = 0.1 * static_cast<double>(i);
    r.element_index = i < 2 ? 0.0 : 1.0;
    r.phi = 0.1;  // refs stay zero
    r.theta = (i % 2 == 0) ? 0.2 : -0.2;
    r.acc_ref_n = 3.0;
    r.acc_ref_e = 4.0;
    r.turn_engaged = i < 2 ? 0.0 : 1.0;
  }
  recs[0].psi = 3.1;
  recs[0].psi_ref = -3.1;
  recs[0].on_line = 0.0;
  recs[0].cross_track = 9.0;  // ignored off the line
  recs[1].on_line = 1.0;
  recs[1].cross_track = 3.0;
  recs[2].on_line = 1.0;
  recs[2].cross_track = 4.0;
  recs[3].on_line = 0.0;
  recs[3].cross_track = 99.0;
  recs[0].sat_mask = 1.0;
  recs[1].sat_mask = 5.0;
  recs[0].pos_d = -10.0;
  recs[1].pos_d = -12.0;
  recs[2].pos_d = -9.5;
  recs[3].pos_d = -10.0;
  recs[1].airspeed = 15.5;
  recs[2].airspeed = 7.0;
  recs[1].fault = 1.0;
  recs[2].fault = 1.0;

  const RunSummary s = summarize(recs);
  CHECK(s.duration == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(s.rms_phi_err == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.rms_theta_err == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(s.rms_psi_err ==
        doctest::Approx(std::abs(psi_wrap) / 2.0).epsilon(1e-12));
  CHECK(s.rms_accel_err == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(s.rms_cross_track == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
  CHECK(s.sat_duty[0] == 0.5);
  CHECK(s.sat_duty[1] == 0.0);
  CHECK(s.sat_duty[2] == 0.25);
  CHECK(s.sat_duty[3] == 0.0);
  CHECK(s.max_alt_excursion == 2.0);
  CHECK(s.min_theta == -0.2);
  CHECK(s.max_theta == 0.2);
  CHECK(s.max_airspeed == 15.5);
  CHECK(s.faults == 2);

  REQUIRE(s.mode_changes.size() == 2);
  CHECK(s.mode_changes[0].t == 0.0);
  CHECK(s.mode_changes[0].mode == 0);
  CHECK(s.mode_changes[1].t == doctest::Approx(0.2));
  CHECK(s.mode_changes[1].mode == 1);

  REQUIRE(s.phases.size() == 2);
  CHECK(s.phases[0].element_index == 0);
  CHECK(s.phases[0].t_begin == 0.0);
  CHECK(s.phases[0].t_end == doctest::Approx(0.1));
  CHECK(s.phases[0].rms_theta_err == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(s.phases[0].rms_psi_err ==
        doctest::Approx(std::abs(psi_wrap) / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.phases[0].rms_cross_track == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(s.phases[1].element_index == 1);
  CHECK(s.phases[1].rms_cross_track == doctest::Approx(4.0).epsilon(1e-12));

  // Empty input degrades to zeros.
  const RunSummary zero = summarize({});
  CHECK(zero.duration == 0.0);
  CHECK(zero.phases.empty());

  const nlohmann::json j = nlohmann::json::parse(summary_to_json(s));
  CHECK(j["schema"] == 1);
  CHECK(j["duration_s"].get<double>() == doctest::Approx(0.3));
  CHECK(j["rms"]["phi_rad"].get<double>() == doctest::Approx(0.1));
  CHECK(j["rms"]["theta_rad"].get<double>() == doctest::Approx(0.2));
  CHECK(j["rms"]["accel_mps2"].get<double>() == doctest::Approx(5.0));
  CHECK(j["rms"]["cross_track_m"].get<double>() ==
        doctest::Approx(std::sqrt(12.5)));
  CHECK(j["saturation_duty"][0].get<double>() == 0.5);
  CHECK(j["saturation_duty"][2].get<double>() == 0.25);
  CHECK(j["max_alt_excursion_m"].get<double>() == 2.0);
  CHECK(j["theta_range_rad"][0].get<double>() == -0.2);
  CHECK(j["theta_range_rad"][1].get<double>() == 0.2);
  CHECK(j["max_airspeed_mps"].get<double>() == 15.5);
  CHECK(j["faults"] == 2);
  CHECK(j["phases"].size() == 2);
  CHECK(j["phases"][1]["element"] == 1);
  CHECK(j["mode_timeline"].size() == 2);
  CHECK(j["mode_timeline"][1]["turn"] == 1);
  CHECK(j["mode_timeline"][1]["t"].get<double>() == doctest::Approx(0.2));
}

TEST_CASE("config: vehicle roundtrip keeps every field") {
  TempDir tmp;

  ControllerConfig cfg;
  cfg.attitude.signal_cutoff_hz = 4.5;
  cfg.attitude.gains.k_eta_roll = 8.8;
  cfg.attitude.gains.k_eta_pitch = 12.5;
  cfg.attitude.gains.k_eta_yaw = 6.5;
  cfg.attitude.gains.k_omega = Vec3(25.0, 26.0, 27.0);
  cfg.attitude.gains.equalize_in_cruise = false;
  cfg.attitude.gains.equalize_speed = 13.0;
  cfg.attitude.gains.equalize_hysteresis = 1.5;
  cfg.attitude.schedule.pitch_a = -2.5e-3;
  cfg.attitude.schedule.pitch_b = -0.04e-3;
  cfg.attitude.schedule.yaw_hover = -1.9e-3;
  cfg.attitude.schedule.flap_gate = 7100.0;
  cfg.attitude.schedule.floor_low_frac = 0.40;
  cfg.attitude.allocation_weights = Vec4(99.0, 888.0, 0.2, 11.0);
  cfg.attitude.allocation_gamma = 2e-4;
  cfg.attitude.allocation_iterations = 12;
  cfg.attitude.flap_pole = 0.26;
  cfg.attitude.flap_rate_limit = 90000.0;
  cfg.attitude.motor_pole = 0.5;
  cfg.outer.rate_divider = 4;
  cfg.outer.schedule.mass = 1.3;
  cfg.outer.schedule.slope_hover = -25.0;
  cfg.outer.schedule.cos_phi_correction = true;
  cfg.outer.compensator_enabled = false;
  cfg.outer.g_flap = 3e-4;
  cfg.outer.comp_cutoff_hz = 0.7;
  cfg.outer.pitch_eff_scale = 1.5;
  cfg.outer.cond_limit = 5e5;
  cfg.heading.coeffs.c2 = -0.2;
  cfg.heading.coeffs.b2 = 0.01;
  cfg.heading.k_beta = 0.6;
  cfg.heading.fy_cutoff_hz = 0.9;
  cfg.guidance.k_xi = 0.8;
  cfg.guidance.a_max = 3.0;
  cfg.guidance.turn_deadband_rad = 20.0 * kDeg;
  cfg.guidance.approach_limit = false;
  cfg.guidance.default_speed = 15.0;
  cfg.psi_slew_rate = 50.0 * kDeg;

  const std::string path = tmp.file("vehicle.json");
  save_vehicle_config(path, cfg);
  const ControllerConfig back = load_vehicle_config(path);

  CHECK(back.attitude.signal_cutoff_hz == 4.5);
  CHECK(back.attitude.gains.k_eta_roll == 8.8);
  CHECK(back.attitude.gains.k_eta_pitch == 12.5);
  CHECK(back.attitude.gains.k_eta_yaw == 6.5);
  CHECK(back.attitude.gains.k_omega == Vec3(25.0, 26.0, 27.0));
  CHECK(back.attitude.gains.equalize_in_cruise == false);
  CHECK(back.attitude.gains.equalize_speed == 13.0);
  CHECK(back.attitude.gains.equalize_hysteresis == 1.5);
  CHECK(back.attitude.schedule.pitch_a == -2.5e-3);
  CHECK(back.attitude.schedule.pitch_b == -0.04e-3);
  CHECK(back.attitude.schedule.yaw_hover == -1.9e-3);
  CHECK(back.attitude.schedule.flap_gate == 7100.0);
  CHECK(back.attitude.schedule.floor_low_frac == 0.40);
  CHECK(back.attitude.allocation_weights == Vec4(99.0, 888.0, 0.2, 11.0));
  CHECK(back.attitude.allocation_gamma == 2e-4);
  CHECK(back.attitude.allocation_iterations == 12);
  CHECK(back.attitude.flap_pole == 0.26);
  CHECK(back.attitude.flap_rate_limit == 90000.0);
  CHECK(back.attitude.motor_pole == 0.5);
  CHECK(back.outer.rate_divider == 4);
  CHECK(back.outer.schedule.mass == 1.3);
  CHECK(back.outer.schedule.slope_hover == -25.0);
  CHECK(back.outer.schedule.cos_phi_correction == true);
  CHECK(back.outer.compensator_enabled == false);
  CHECK(back.outer.g_flap == 3e-4);
  CHECK(back.outer.comp_cutoff_hz == 0.7);
  CHECK(back.outer.pitch_eff_scale == 1.5);
  CHECK(back.outer.cond_limit == 5e5);
  CHECK(back.heading.coeffs.c2 == -0.2);
  CHECK(back.heading.coeffs.b2 == 0.01);
  CHECK(back.heading.k_beta == 0.6);
  CHECK(back.heading.fy_cutoff_hz == 0.9);
  CHECK(back.guidance.k_xi == 0.8);
  CHECK(back.guidance.a_max == 3.0);
  CHECK(back.guidance.turn_deadband_rad ==
        doctest::Approx(20.0 * kDeg).epsilon(1e-12));
  CHECK(back.guidance.approach_limit == false);
  CHECK(back.guidance.default_speed == 15.0);
  CHECK(back.psi_slew_rate == doctest::Approx(50.0 * kDeg).epsilon(1e-12));

  // Shared clocks are tied together on load.
  CHECK(back.outer.sample_hz == back.attitude.sample_hz);
  CHECK(back.heading.sample_hz == back.attitude.sample_hz);
  CHECK(back.heading.gravity == back.outer.schedule.gravity);

  // Defaults survive an empty-file roundtrip.
  const std::string dflt = tmp.file("default.json");
  save_vehicle_config(dflt, ControllerConfig{});
  const ControllerConfig d = load_vehicle_config(dflt);
  const ControllerConfig ref;
  CHECK(d.attitude.gains.k_eta_pitch == ref.attitude.gains.k_eta_pitch);
  CHECK(d.attitude.allocation_gamma == ref.attitude.allocation_gamma);
  CHECK(d.guidance.a_max == ref.guidance.a_max);
}

TEST_CASE("config: plant roundtrip keeps every field") {
  TempDir tmp;

  PlantSetup setup;
  setup.plant.mass = 1.4;
  setup.plant.inertia = Vec3(0.04, 0.01, 0.03);
  setup.plant.k_thrust = 1.3e-7;
  setup.plant.motor_arm = 0.25;
  setup.plant.k_wash = 1.3e-6;
  setup.plant.stall_start_deg = 14.0;
  setup.plant.rot_damping = Vec3(0.011, 0.013, 0.009);
  setup.sensors.sigma_gyro = 0.003;
  setup.sensors.sigma_pitot = 0.15;
  setup.sensors.gnss_rate_hz = 5.0;
  setup.sensors.gnss_latency_s = 0.2;
  setup.sensors.noiseless = true;

  const std::string path = tmp.file("plant.json");
  save_plant_config(path, setup);
  const PlantSetup back = load_plant_config(path);

  CHECK(back.plant.mass == 1.4);
  CHECK(back.plant.inertia == Vec3(0.04, 0.01, 0.03));
  CHECK(back.plant.k_thrust == 1.3e-7);
  CHECK(back.plant.motor_arm == 0.25);
  CHECK(back.plant.k_wash == 1.3e-6);
  CHECK(back.plant.stall_start_deg == 14.0);
  CHECK(back.plant.rot_damping == Vec3(0.011, 0.013, 0.009));
  CHECK(back.sensors.sigma_gyro == 0.003);
  CHECK(back.sensors.sigma_pitot == 0.15);
  CHECK(back.sensors.gnss_rate_hz == 5.0);
  CHECK(back.sensors.gnss_latency_s == 0.2);
  CHECK(back.sensors.noiseless == true);
  // Untouched fields keep their defaults.
  CHECK(back.plant.chord == PlantParams{}.chord);
}

TEST_CASE("config: scenario roundtrip with plan, wind and attitude") {
  TempDir tmp;

  ScenarioSpec spec;
  spec.name = "box";
  spec.duration_s = 45.0;
  spec.seed = 99;
  spec.controller.attitude.gains.k_eta_pitch = 12.5;
  spec.setup.plant.mass = 1.4;
  spec.wind.speed = 6.7;
  spec.wind.from_deg = -70.0;
  spec.wind.gust.t0 = 5.0;
  spec.wind.gust.duration = 3.0;
  spec.wind.gust.peak = 4.0;
  spec.wind.gust.dir = Vec3(0.0, 1.0, 0.0);
  spec.wind.turb_sigma = 0.8;
  spec.initial.pos = Vec3(1.0, 2.0, -30.0);
  spec.initial.vel = Vec3(0.5, 0.0, 0.0);
  spec.initial.q = quat_from_euler_zxy({5.0 * kDeg, -20.0 * kDeg, 90.0 * kDeg});

  PlanElement hover;
  hover.type = ElementType::kHover;
  hover.point = Vec3(0.0, 0.0, -25.0);
  hover.heading = 45.0 * kDeg;
  hover.hold_s = 2.5;
  PlanElement go;
  go.type = ElementType::kGotoWaypoint;
  go.point = Vec3(100.0, 50.0, -30.0);
  go.speed = 12.0;
  PlanElement line;
  line.type = ElementType::kFollowLine;
  line.point = Vec3(100.0, 50.0, -30.0);
  line.end = Vec3(400.0, 50.0, -30.0);
  line.speed = 16.0;
  spec.plan.elements = {hover, go, line};

  const std::string path = tmp.file("scenario.json");
  save_scenario_config(path, spec);
  const ScenarioSpec back = load_scenario_config(path);

  CHECK(back.name == "box");
  CHECK(back.duration_s == 45.0);
  CHECK(back.seed == 99);
  CHECK(back.controller.attitude.gains.k_eta_pitch == 12.5);
  CHECK(back.setup.plant.mass == 1.4);
  CHECK(back.wind.speed == 6.7);
  CHECK(back.wind.from_deg == -70.0);
  CHECK(back.wind.gust.peak == 4.0);
  CHECK(back.wind.gust.dir == Vec3(0.0, 1.0, 0.0));
  CHECK(back.wind.turb_sigma == 0.8);
  CHECK(back.initial.pos == Vec3(1.0, 2.0, -30.0));
  CHECK(back.initial.vel == Vec3(0.5, 0.0, 0.0));
  const Quat qe = back.initial.q.conjugate() * spec.initial.q;
  CHECK(2.0 * std::atan2(std::sqrt(qe.x * qe.x + qe.y * qe.y + qe.z * qe.z),
                         std::abs(qe.w)) < 1e-9);

  REQUIRE(back.plan.elements.size() == 3);
  CHECK(back.plan.elements[0].type == ElementType::kHover);
  CHECK(back.plan.elements[0].point == Vec3(0.0, 0.0, -25.0));
  CHECK(back.plan.elements[0].heading ==
        doctest::Approx(45.0 * kDeg).epsilon(1e-12));
  CHECK(back.plan.elements[0].hold_s == 2.5);
  CHECK(back.plan.elements[1].type == ElementType::kGotoWaypoint);
  CHECK(back.plan.elements[1].speed == 12.0);
  CHECK(back.plan.elements[2].type == ElementType::kFollowLine);
  CHECK(back.plan.elements[2].point == Vec3(100.0, 50.0, -30.0));
  CHECK(back.plan.elements[2].end == Vec3(400.0, 50.0, -30.0));
  CHECK(back.plan.elements[2].speed == 16.0);
}

TEST_CASE("config: malformed files fail with the offending path") {
  TempDir tmp;

  auto load_text = [&](const char* name, const std::string& body) {
    const std::string p = tmp.file(name);
    write_text(p, body);
    return caught_message([&] { load_vehicle_config(p); });
  };

  const std::string unknown = load_text(
      "unknown.json",
      R"({"schema":1,"kind":"vehicle","attitude":{"bogus":1}})");
  CHECK(contains(unknown, "attitude.bogus"));
  CHECK(contains(unknown, "unknown key"));

  const std::string wrong_type = load_text(
      "type.json",
      R"({"schema":1,"kind":"vehicle","guidance":{"a_max":"fast"}})");
  CHECK(contains(wrong_type, "guidance.a_max"));
  CHECK(contains(wrong_type, "expected a number"));

  const std::string schema =
      load_text("schema.json", R"({"schema":2,"kind":"vehicle"})");
  CHECK(contains(schema, "unsupported version 2"));

  const std::string kind =
      load_text("kind.json", R"({"schema":1,"kind":"plant"})");
  CHECK(contains(kind, "expected \"vehicle\""));

  const std::string arity = load_text(
      "arity.json",
      R"({"kind":"vehicle","attitude":{"gains":{"k_omega":[1,2]}}})");
  CHECK(contains(arity, "array of 3 numbers"));

  const std::string not_obj = load_text("notobj.json", "[1,2]");
  CHECK(contains(not_obj, "expected an object"));

  const std::string syntax = load_text("syntax.json", "{oops");
  CHECK(contains(syntax, "syntax.json"));

  const std::string sc = tmp.file("badplan.json");
  write_text(sc, R"({"kind":"scenario","plan":[{"type":"climb"}]})");
  const std::string plan_msg =
      caught_message([&] { load_scenario_config(sc); });
  CHECK(contains(plan_msg, "plan[0].type"));
  CHECK(contains(plan_msg, "\"hover\", \"goto\" or \"line\""));

  CHECK(contains(
      caught_message([&] { load_vehicle_config(tmp.file("nope.json")); }),
      "cannot open"));
}

TEST_CASE("config: scenario references vehicle and plant files") {
  TempDir tmp;

  ControllerConfig cfg;
  cfg.attitude.gains.k_eta_pitch = 11.25;
  save_vehicle_config(tmp.file("vehicle.json"), cfg);
  PlantSetup setup;
  setup.plant.mass = 1.55;
  save_plant_config(tmp.file("plant.json"), setup);
  write_text(tmp.file("scenario.json"), R"({
    "schema": 1, "kind": "scenario", "name": "ref",
    "vehicle": "vehicle.json", "plant": "plant.json",
    "plan": [{"type": "hover", "point": [0, 0, -10]}]
  })");

  const ScenarioSpec spec = load_scenario_config(tmp.file("scenario.json"));
  CHECK(spec.name == "ref");
  CHECK(spec.controller.attitude.gains.k_eta_pitch == 11.25);
  CHECK(spec.setup.plant.mass == 1.55);
  REQUIRE(spec.plan.elements.size() == 1);
  CHECK(spec.plan.elements[0].point == Vec3(0.0, 0.0, -10.0));

  // A broken reference names the referenced file.
  write_text(tmp.file("dangling.json"), R"({
    "kind": "scenario", "vehicle": "gone.json", "plan": []
  })");
  CHECK(contains(
      caught_message([&] { load_scenario_config(tmp.file("dangling.json")); }),
      "gone.json"));
}

TEST_CASE("config: validation reports findings instead of throwing") {
  TempDir tmp;

  // Clean files validate clean.
  save_vehicle_config(tmp.file("vehicle.json"), ControllerConfig{});
  CHECK(validate_config_file(tmp.file("vehicle.json")).empty());
  save_plant_config(tmp.file("plant.json"), PlantSetup{});
  CHECK(validate_config_file(tmp.file("plant.json")).empty());

  ScenarioSpec spec;
  PlanElement hover;
  hover.type = ElementType::kHover;
  spec.plan.elements = {hover};
  save_scenario_config(tmp.file("scenario.json"), spec);
  CHECK(validate_config_file(tmp.file("scenario.json")).empty());

  // Physically impossible vehicle numbers.
  ControllerConfig bad;
  bad.attitude.signal_cutoff_hz = 400.0;  // above Nyquist at 500 Hz
  bad.guidance.a_max = -1.0;
  save_vehicle_config(tmp.file("bad_vehicle.json"), bad);
  const auto vf = validate_config_file(tmp.file("bad_vehicle.json"));
  REQUIRE(vf.size() == 2);
  CHECK(contains(vf[0], "above Nyquist"));
  CHECK(contains(vf[1], "a_max must be positive"));

  PlantSetup bad_plant;
  bad_plant.plant.mass = -1.0;
  bad_plant.plant.k_thrust = 0.0;
  save_plant_config(tmp.file("bad_plant.json"), bad_plant);
  const auto pf = validate_config_file(tmp.file("bad_plant.json"));
  REQUIRE(pf.size() == 2);
  CHECK(contains(pf[0], "mass must be positive"));
  CHECK(contains(pf[1], "k_thrust must be positive"));

  ScenarioSpec bad_sc;
  bad_sc.duration_s = -5.0;
  save_scenario_config(tmp.file("bad_scenario.json"), bad_sc);
  const auto sf = validate_config_file(tmp.file("bad_scenario.json"));
  REQUIRE(sf.size() == 2);
  CHECK(contains(sf[0], "duration_s must be positive"));
  CHECK(contains(sf[1], "plan has no elements"));

  ScenarioSpec short_line;
  PlanElement line;
  line.type = ElementType::kFollowLine;
  line.point = Vec3(0.0, 0.0, -10.0);
  line.end = Vec3(0.5, 0.0, -10.0);
  line.speed = -2.0;
  short_line.plan.elements = {line};
  save_scenario_config(tmp.file("short_line.json"), short_line);
  const auto lf = validate_config_file(tmp.file("short_line.json"));
  REQUIRE(lf.size() == 2);
  CHECK(contains(lf[0], "shorter than 1 m"));
  CHECK(contains(lf[1], "speed must be non-negative"));

  write_text(tmp.file("mystery.json"), R"({"kind":"mystery"})");
  const auto mf = validate_config_file(tmp.file("mystery.json"));
  REQUIRE(mf.size() == 1);
  CHECK(contains(mf[0], "missing or unknown \"kind\""));

  write_text(tmp.file("broken.json"), "{nope");
  CHECK(validate_config_file(tmp.file("broken.json")).size() == 1);

  // Structural errors come back as findings, not exceptions.
  write_text(tmp.file("typo.json"),
             R"({"kind":"vehicle","attitude":{"bogus":1}})");
  const auto tf = validate_config_file(tmp.file("typo.json"));
  REQUIRE(tf.size() == 1);
  CHECK(contains(tf[0], "unknown key"));

  CHECK(validate_config_file(tmp.file("missing.json")).size() == 1);
}

TEST_CASE("identification: stationary windows are selected on a fixed grid") {
  SegmentCriteria crit;
  crit.window_s = 1.0;
  crit.sample_hz = 500.0;

  std::vector<LogRecord> recs(2300);
  for (size_t i = 0; i < recs.size(); ++i) {
    LogRecord& r = recs[i];
    r.t = static_cast<double>(i) / 500.0;
    r.airspeed_valid = 1.0;
    if (i < 500) {  // steady: kept
      r.theta = 0.1;
      r.airspeed = 10.0;
    } else if (i < 1000) {  // pitch ramp 0..0.4 rad: std 6.6 deg, rejected
      r.theta = 0.4 * static_cast<double>(i - 500) / 499.0;
      r.airspeed = 10.0;
    } else if (i < 1500) {  // speed ramp 8..12: std 1.15, rejected
      r.theta = -0.5;
      r.airspeed = 8.0 + 4.0 * static_cast<double>(i - 1000) / 499.0;
    } else if (i < 2000) {  // steady but one pitot dropout
      r.theta = 0.05;
      r.airspeed = 12.0;
      if (i == 1700) r.airspeed_valid = 0.0;
    } else {  // partial trailing window: never considered
      r.theta = 0.0;
      r.airspeed = 10.0;
    }
  }

  const auto segs = select_segments(recs, crit);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].begin == 0);
  CHECK(segs[0].end == 500);
  CHECK(segs[0].mean_speed == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(segs[0].mean_theta == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(segs[0].airspeed_valid);
  CHECK(segs[1].begin == 1500);
  CHECK(segs[1].end == 2000);
  CHECK(segs[1].mean_speed == doctest::Approx(12.0).epsilon(1e-12));
  CHECK_FALSE(segs[1].airspeed_valid);

  // Shorter input than one window: nothing.
  CHECK(select_segments(std::vector<LogRecord>(400), crit).empty());
}

TEST_CASE("identification: least squares guards and split semantics") {
  // Exact linear data.
  {
    Eigen::MatrixXd X(10, 2);
    Eigen::VectorXd y(10);
    for (int i = 0; i < 10; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = i;
      y(i) = 2.0 + 3.0 * i;
    }
    const LinearFit f = fit_linear(X, y);
    CHECK(f.ok);
    CHECK(f.coeffs(0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(f.coeffs(1) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(f.train_rms < 1e-9);
    CHECK(f.test_rms < 1e-9);
    CHECK(f.warning.empty());
  }

  // Fewer rows than unknowns.
  {
    Eigen::MatrixXd X(1, 2);
    X << 1.0, 2.0;
    Eigen::VectorXd y(1);
    y << 3.0;
    const LinearFit f = fit_linear(X, y);
    CHECK_FALSE(f.ok);
    CHECK(f.warning == "not enough samples");
  }

  // Collinear columns.
  {
    Eigen::MatrixXd X(20, 2);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) {
      X(i, 0) = i;
      X(i, 1) = i;
      y(i) = 5.0 * i;
    }
    const LinearFit f = fit_linear(X, y);
    CHECK_FALSE(f.ok);
    CHECK(f.warning == "insufficient excitation");
  }

  // The split is chronological: a corrupted tail shows up only in test_rms.
  {
    const int n = 100;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = std::sin(0.37 * i);
      y(i) = 2.0 + 3.0 * X(i, 1) + (i >= 80 ? 1.0 : 0.0);
    }
    const LinearFit f = fit_linear(X, y, 0.8);
    CHECK(f.ok);
    CHECK(f.coeffs(0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(f.coeffs(1) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(f.train_rms < 1e-9);
    CHECK(f.test_rms == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("identification: planted effectiveness laws come back exactly") {
  using testsupport::EffectivenessLogSpec;
  using testsupport::synth_effectiveness_log;

  EffectivenessLogSpec spec;
  spec.segment_speeds = {0.0, 8.0, 14.0};
  spec.segment_theta_rad = {0.0, -0.6, -1.2};
  spec.segment_airspeed_valid = {0, 1, 1};
  const auto log = synth_effectiveness_log(spec);

  SegmentCriteria crit;
  crit.window_s = spec.window_s;
  const IdentificationResult r = run_identification(log, crit);

  REQUIRE(r.segments.size() == 3);
  CHECK_FALSE(r.segments[0].airspeed_valid);
  CHECK(r.segments[1].airspeed_valid);
  CHECK(r.segments[1].mean_speed == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(r.segments[2].mean_theta == doctest::Approx(-1.2).epsilon(1e-12));

  REQUIRE(r.pitch_points.size() == 3);
  for (size_t k = 0; k < 3; ++k) {
    const double v = spec.segment_speeds[k];
    CHECK(r.pitch_points[k].ok);
    CHECK(r.pitch_points[k].value ==
          doctest::Approx(spec.pitch_a + spec.pitch_b * v * v).epsilon(1e-10));
    CHECK(r.pitch_points[k].rms < 1e-9);
    CHECK(r.yaw_points[k].ok);
    CHECK(r.yaw_points[k].value ==
          doctest::Approx(spec.yaw_a + spec.yaw_b * v * v).epsilon(1e-10));
    CHECK(r.roll_points[k].ok);
    CHECK(r.roll_points[k].value ==
          doctest::Approx(spec.roll_g).epsilon(1e-10));
    CHECK(r.thrust_points[k].ok);
    CHECK(r.thrust_points[k].value ==
          doctest::Approx(spec.thrust_g).epsilon(1e-10));
  }

  // Two airspeed-valid points pin the quadratic schedule exactly.
  CHECK(r.pitch_schedule.ok);
  CHECK(r.pitch_schedule.a == doctest::Approx(spec.pitch_a).epsilon(1e-9));
  CHECK(r.pitch_schedule.b == doctest::Approx(spec.pitch_b).epsilon(1e-9));
  CHECK(r.yaw_schedule.ok);
  CHECK(r.yaw_schedule.a == doctest::Approx(spec.yaw_a).epsilon(1e-9));
  CHECK(r.yaw_schedule.b == doctest::Approx(spec.yaw_b).epsilon(1e-9));

  // Mild measurement noise moves the points by percent, not decades.
  EffectivenessLogSpec noisy = spec;
  noisy.response_noise = 0.02;
  const IdentificationResult rn =
      run_identification(synth_effectiveness_log(noisy), crit);
  for (size_t k = 0; k < 3; ++k) {
    const double v = spec.segment_speeds[k];
    const double truth = spec.pitch_a + spec.pitch_b * v * v;
    CHECK(rn.pitch_points[k].value ==
          doctest::Approx(truth).epsilon(0.10));
    CHECK(rn.pitch_points[k].rms > 0.0);
  }

  // One valid segment is not a schedule.
  EffectivenessLogSpec lone = spec;
  lone.segment_speeds = {0.0, 8.0};
  lone.segment_theta_rad = {0.0, -0.6};
  lone.segment_airspeed_valid = {0, 1};
  const IdentificationResult rl =
      run_identification(synth_effectiveness_log(lone), crit);
  CHECK_FALSE(rl.pitch_schedule.ok);
  CHECK(rl.pitch_schedule.warning ==
        "need at least two segments with measurable airspeed");
}

TEST_CASE("identification: the direct sideslip model wins on planted data") {
  using testsupport::SideslipLogSpec;
  using testsupport::synth_sideslip_log;

  SideslipLogSpec spec;
  const auto log = synth_sideslip_log(spec);
  const SideslipFits f = fit_sideslip(log);

  CHECK(f.direct.ok);
  CHECK(f.direct.c == doctest::Approx(spec.c2).epsilon(1e-9));
  CHECK(std::abs(f.direct.b) < 1e-12);
  CHECK(f.direct.train_rms < 1e-12);
  CHECK(f.direct.test_rms < 1e-12);

  // The speed-scaled forms cannot absorb a speed-independent law while
  // the speed sweeps 8..16; the planted form wins by orders of magnitude.
  CHECK(f.over_v2.ok);
  CHECK(f.over_v.ok);
  CHECK(f.direct.test_rms < 0.1 * f.over_v2.test_rms);
  CHECK(f.direct.test_rms < 0.1 * f.over_v.test_rms);

  // Bias term comes back too.
  SideslipLogSpec biased = spec;
  biased.b2 = 0.05;
  const SideslipFits fb = fit_sideslip(synth_sideslip_log(biased));
  CHECK(fb.direct.b == doctest::Approx(0.05).epsilon(1e-9));

  // Hovering data has no usable rows.
  auto grounded = log;
  for (auto& r : grounded) r.airspeed_valid = 0.0;
  const SideslipFits fg = fit_sideslip(grounded);
  CHECK_FALSE(fg.direct.ok);
  CHECK(fg.direct.warning == "not enough forward-flight data");
  CHECK(fg.over_v.warning == fg.direct.warning);

  // min_speed filters rows before fitting.
  const SideslipFits ff = fit_sideslip(log, 20.0);
  CHECK_FALSE(ff.direct.ok);
}

TEST_CASE("identification: flap columns explain the body X force") {
  using testsupport::FlapLiftLogSpec;
  using testsupport::synth_flap_lift_log;

  FlapLiftLogSpec spec;
  const auto log = synth_flap_lift_log(spec);
  const FlapLiftFits f = fit_flap_lift(log);

  CHECK(f.with_flaps.ok);
  CHECK(f.g_flap == doctest::Approx(spec.g_flap).epsilon(1e-9));
  REQUIRE(f.with_flaps.coeffs.size() == 5);
  CHECK(f.with_flaps.coeffs(0) == doctest::Approx(spec.b0).epsilon(1e-9));
  CHECK(f.with_flaps.coeffs(1) == doctest::Approx(spec.b_q).epsilon(1e-9));
  CHECK(f.with_flaps.coeffs(2) == doctest::Approx(spec.b_theta).epsilon(1e-9));
  CHECK(f.with_flaps.test_rms < 1e-10);
  // Without the flap columns the deflection force is unexplained residual.
  CHECK(f.simple.ok);
  CHECK(f.simple.test_rms > 100.0 * std::max(f.with_flaps.test_rms, 1e-14));
  CHECK(f.simple.test_rms > 0.05);

  // No planted flap lift: the extra columns buy nothing.
  FlapLiftLogSpec none = spec;
  none.g_flap = 0.0;
  none.fx_noise = 0.01;
  const FlapLiftFits fn = fit_flap_lift(synth_flap_lift_log(none));
  CHECK(std::abs(fn.g_flap) < 1e-5);
  CHECK(fn.simple.test_rms / fn.with_flaps.test_rms ==
        doctest::Approx(1.0).epsilon(0.1));

  // Too short to say anything.
  const FlapLiftFits fs = fit_flap_lift(std::vector<LogRecord>(10));
  CHECK_FALSE(fs.simple.ok);
  CHECK(fs.simple.warning == "not enough data");
}

TEST_CASE("identification: report is machine readable") {
  using testsupport::EffectivenessLogSpec;
  using testsupport::synth_effectiveness_log;
  using testsupport::SideslipLogSpec;
  using testsupport::synth_sideslip_log;

  EffectivenessLogSpec spec;
  spec.segment_speeds = {0.0, 8.0, 14.0};
  spec.segment_theta_rad = {0.0, -0.6, -1.2};
  spec.segment_airspeed_valid = {0, 1, 1};
  SegmentCriteria crit;
  crit.window_s = spec.window_s;
  const IdentificationResult r =
      run_identification(synth_effectiveness_log(spec), crit);

  const nlohmann::json j = nlohmann::json::parse(identification_report(r));
  CHECK(j["schema"] == 1);
  REQUIRE(j["segments"].size() == 3);
  CHECK(j["segments"][1]["begin"] == 1000);
  CHECK(j["segments"][1]["end"] == 2000);
  CHECK(j["segments"][1]["mean_speed"].get<double>() == doctest::Approx(8.0));
  CHECK(j["segments"][1]["airspeed_valid"] == true);
  CHECK(j["segments"][0]["airspeed_valid"] == false);

  REQUIRE(j["pitch_points"].size() == 3);
  CHECK(j["pitch_points"][2]["value"].get<double>() ==
        doctest::Approx(spec.pitch_a + spec.pitch_b * 196.0));
  CHECK(j["pitch_points"][2]["ok"] == true);
  CHECK(j["pitch_points"][2]["warning"] == "");
  CHECK(j["yaw_points"].size() == 3);
  CHECK(j["roll_points"].size() == 3);
  CHECK(j["thrust_points"].size() == 3);

  CHECK(j["pitch_schedule"]["ok"] == true);
  CHECK(j["pitch_schedule"]["a"].get<double>() ==
        doctest::Approx(spec.pitch_a));
  CHECK(j["pitch_schedule"]["b"].get<double>() ==
        doctest::Approx(spec.pitch_b));
  CHECK(j["yaw_schedule"].contains("rms"));

  // The effectiveness log plants no lateral law; the keys still exist
  // and carry the failure flags.
  CHECK(j["sideslip"]["direct"].contains("ok"));
  CHECK(j["sideslip"]["over_v2"].contains("test_rms"));
  CHECK(j["sideslip"]["over_v"].contains("warning"));
  CHECK(j["flap_lift"]["with_flaps"]["coeffs"].is_array());
  CHECK(j["flap_lift"].contains("g_flap"));

  // Positive path for the lateral fits, from the sideslip log.
  const IdentificationResult rs =
      run_identification(synth_sideslip_log(SideslipLogSpec{}), crit);
  const nlohmann::json js = nlohmann::json::parse(identification_report(rs));
  CHECK(js["sideslip"]["direct"]["ok"] == true);
  CHECK(js["sideslip"]["direct"]["c"].get<double>() ==
        doctest::Approx(-0.196));
}

TEST_CASE("plots: standard set renders from a log") {
  TempDir tmp;

  std::vector<LogRecord> recs(400);
  for (size_t i = 0; i < recs.size(); ++i) {
    LogRecord& r = recs[i];
    const double t = static_cast<double>(i) / 500.0;
    r.t = t;
    r.phi = 0.2 * std::sin(2.0 * M_PI * 1.3 * t);
    r.phi_ref = 0.2 * std::sin(2.0 * M_PI * 1.3 * t + 0.2);
    r.theta = -0.5 + 0.1 * std::sin(2.0 * M_PI * 0.7 * t);
    r.theta_ref = -0.5;
    r.pos_n = 10.0 * t;
    r.pos_e = 2.0 * std::sin(2.0 * M_PI * 0.2 * t);
    r.vel_n = 10.0;
    r.acc_f_n = std::sin(t);
    r.acc_ref_n = std::sin(t + 0.1);
    r.u_cmd_0 = 500.0 * std::sin(2.0 * M_PI * 2.0 * t);
    r.u_cmd_2 = 6800.0;
    r.u_cmd_3 = 6700.0;
    r.airspeed = 10.0 + std::sin(t);
  }

  const auto paths = write_standard_plots(tmp.path.string(), "case", recs);
  CHECK(paths.size() >= 4);
  for (const auto& p : paths) {
    CAPTURE(p);
    REQUIRE(fs::exists(p));
    const std::string body = read_text(p);
    CHECK(body.size() > 200);
    CHECK(contains(body, "<svg"));
    CHECK(contains(body, "</svg>"));
    CHECK_FALSE(contains(body, "nan"));
  }

  // Nothing to plot is not an error.
  CHECK(write_standard_plots(tmp.path.string(), "none", {}).empty());

  // Degenerate data (single point, zero range) still renders.
  PlotSpec spec;
  spec.title = "flatline";
  PlotSeries s;
  s.label = "y";
  s.x = {0.0, 1.0, 2.0};
  s.y = {4.0, 4.0, 4.0};
  spec.series = {s};
  const std::string flat = tmp.file("flat.svg");
  CHECK(write_svg_plot(flat, spec));
  const std::string body = read_text(flat);
  CHECK(contains(body, "</svg>"));
  CHECK_FALSE(contains(body, "nan"));

  // Unwritable destination reports failure.
  CHECK_FALSE(write_svg_plot("/nonexistent_dir_xyz/plot.svg", spec));
}
