// Command-line front end: fly scenarios, fit effectiveness models from
// logs, render plots, and check config files.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hoverwing/config.hpp"
#include "hoverwing/identification.hpp"
#include "hoverwing/scenario.hpp"
#include "hoverwing/svg_plot.hpp"

namespace {

using namespace hoverwing;

struct RunJob {
  ScenarioSpec spec;
  RunOptions opts;
};

int run_batch(std::vector<RunJob>& jobs, int jobs_n) {
  std::atomic<size_t> next{0};
  std::atomic<int> worst{0};
  std::mutex print_mu;

  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      RunJob& job = jobs[i];
      job.opts.keep_records = false;
      const RunResult res = run_scenario(job.spec, job.opts);
      {
        std::lock_guard<std::mutex> lock(print_mu);
        if (res.exit_code == 0) {
          std::printf("%-16s ok    %6.1f s flown, log %s\n",
                      job.spec.name.c_str(), res.summary.duration,
                      res.log_path.c_str());
        } else {
          std::printf("%-16s FAIL  %s\n", job.spec.name.c_str(),
                      res.fault_message.c_str());
        }
      }
      int cur = worst.load();
      while (res.exit_code > cur &&
             !worst.compare_exchange_weak(cur, res.exit_code)) {
      }
    }
  };

  const int n =
      std::max(1, std::min(jobs_n, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return worst.load();
}

PlotSeries schedule_curve(const SpeedScheduleFit& s, double v_max) {
  PlotSeries curve;
  curve.label = "fit a + b V^2";
  curve.color = "#d62728";
  for (double v = 0.0; v <= v_max; v += v_max / 100.0) {
    curve.x.push_back(v);
    curve.y.push_back(s.a + s.b * v * v);
  }
  return curve;
}

void add_schedule_plot(std::vector<std::string>& written,
                       const std::string& dir, const std::string& name,
                       const std::vector<EffectivenessFit>& points,
                       const SpeedScheduleFit& schedule) {
  PlotSpec spec;
  spec.title = name + " effectiveness vs airspeed";
  spec.x_label = "airspeed [m/s]";
  spec.y_label = "effectiveness [rad/s^2 per unit]";
  PlotSeries pts;
  pts.label = "segment fits";
  pts.color = "#1f77b4";
  double v_max = 1.0;
  for (const auto& p : points) {
    if (!p.ok) continue;
    pts.x.push_back(p.mean_speed);
    pts.y.push_back(p.value);
    v_max = std::max(v_max, p.mean_speed);
  }
  if (pts.x.empty()) return;
  spec.series.push_back(pts);
  if (schedule.ok) spec.series.push_back(schedule_curve(schedule, v_max));
  const std::string path = dir + "/id_" + name + "_schedule.svg";
  if (write_svg_plot(path, spec)) written.push_back(path);
}

void add_sideslip_plot(std::vector<std::string>& written,
                       const std::string& dir,
                       const std::vector<LogRecord>& records,
                       const SideslipFits& fits) {
  PlotSpec spec;
  spec.title = "sideslip vs lateral specific force";
  spec.x_label = "f_y filtered [m/s^2]";
  spec.y_label = "beta [rad]";
  PlotSeries pts;
  pts.label = "samples";
  pts.color = "#1f77b4";
  double fy_min = 0.0, fy_max = 0.0;
  const size_t stride = std::max<size_t>(1, records.size() / 2000);
  for (size_t i = 0; i < records.size(); i += stride) {
    const LogRecord& r = records[i];
    if (r.airspeed_valid == 0.0) continue;
    pts.x.push_back(r.f_y_f);
    pts.y.push_back(r.beta);
    fy_min = std::min(fy_min, r.f_y_f);
    fy_max = std::max(fy_max, r.f_y_f);
  }
  if (pts.x.size() < 2) return;
  spec.series.push_back(pts);
  if (fits.direct.ok) {
    PlotSeries line;
    line.label = "fit c2 f_y + b2";
    line.color = "#d62728";
    line.x = {fy_min, fy_max};
    line.y = {fits.direct.c * fy_min + fits.direct.b,
              fits.direct.c * fy_max + fits.direct.b};
    spec.series.push_back(line);
  }
  const std::string path = dir + "/id_sideslip.svg";
  if (write_svg_plot(path, spec)) written.push_back(path);
}

void add_flap_lift_plot(std::vector<std::string>& written,
                        const std::string& dir,
                        const std::vector<LogRecord>& records,
                        const FlapLiftFits& fits) {
  if (!fits.simple.ok || !fits.with_flaps.ok) return;
  PlotSpec spec;
  spec.title = "body-X specific force: measured vs models";
  spec.x_label = "t [s]";
  spec.y_label = "f_x [m/s^2]";
  PlotSeries meas, simple, flaps;
  meas.label = "measured";
  meas.color = "#1f77b4";
  simple.label = "model without flap terms";
  simple.color = "#7f7f7f";
  simple.dashed = true;
  flaps.label = "model with flap terms";
  flaps.color = "#d62728";
  const size_t stride = std::max<size_t>(1, records.size() / 4000);
  const auto& b1 = fits.simple.coeffs;
  const auto& b2 = fits.with_flaps.coeffs;
  for (size_t i = 0; i < records.size(); i += stride) {
    const LogRecord& r = records[i];
    meas.x.push_back(r.t);
    meas.y.push_back(r.f_x);
    simple.x.push_back(r.t);
    simple.y.push_back(b1(0) + b1(1) * r.gyro_q + b1(2) * r.theta);
    flaps.x.push_back(r.t);
    flaps.y.push_back(b2(0) + b2(1) * r.gyro_q + b2(2) * r.theta +
                      b2(3) * r.u_est_0 + b2(4) * r.u_est_1);
  }
  spec.series = {meas, simple, flaps};
  const std::string path = dir + "/id_flap_lift.svg";
  if (write_svg_plot(path, spec)) written.push_back(path);
}

/// One SVG per fitted model, written next to the report.
std::vector<std::string> write_identification_plots(
    const std::string& dir, const std::vector<LogRecord>& records,
    const IdentificationResult& r) {
  std::vector<std::string> written;
  add_schedule_plot(written, dir, "pitch", r.pitch_points, r.pitch_schedule);
  add_schedule_plot(written, dir, "yaw", r.yaw_points, r.yaw_schedule);
  add_sideslip_plot(written, dir, records, r.sideslip);
  add_flap_lift_plot(written, dir, records, r.flap_lift);
  return written;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tailsitter flight stack: simulate, identify, plot"};
  app.require_subcommand(1);

  // --- run -----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Fly a scenario closed-loop");
  std::string preset;
  std::string scenario_path;
  std::string out_dir = "runs";
  std::string dump_config;
  double duration = -1.0;
  std::uint64_t seed = 0;
  bool all_presets = false;
  bool list_presets = false;
  bool plots = false;
  int jobs_n = 1;
  run->add_option("--preset", preset, "Built-in mission name");
  run->add_option("--scenario", scenario_path, "Scenario JSON file");
  run->add_flag("--all-presets", all_presets, "Fly every built-in mission");
  run->add_flag("--list-presets", list_presets, "Print mission names");
  run->add_option("--out", out_dir, "Output directory")
      ->capture_default_str();
  auto* seed_opt = run->add_option("--seed", seed, "Override the RNG seed");
  auto* dur_opt =
      run->add_option("--duration", duration, "Override duration, seconds");
  run->add_flag("--plots", plots, "Write SVG plots next to the log");
  run->add_option("--jobs", jobs_n, "Parallel runs for --all-presets")
      ->capture_default_str();
  run->add_option("--dump-config", dump_config,
                  "Write the resolved scenario JSON and exit");

  // --- identify --------------------------------------------------------------
  auto* identify =
      app.add_subcommand("identify", "Fit effectiveness models from logs");
  std::vector<std::string> id_logs;
  std::string id_out;
  double id_window = 10.0;
  identify->add_option("--log", id_logs, "Flight log CSV (repeatable)")
      ->required();
  identify->add_option("--out", id_out, "Report path (default: stdout)");
  identify->add_option("--window", id_window, "Segment window, seconds")
      ->capture_default_str();

  // --- plot ------------------------------------------------------------------
  auto* plot = app.add_subcommand("plot", "Render SVG plots from a log");
  std::string plot_log;
  std::string plot_out = ".";
  std::string plot_stem;
  plot->add_option("--log", plot_log, "Flight log CSV")->required();
  plot->add_option("--out", plot_out, "Output directory")
      ->capture_default_str();
  plot->add_option("--stem", plot_stem, "Filename stem (default: log name)");

  // --- validate-config ---------------------------------------------------------
  auto* validate =
      app.add_subcommand("validate-config", "Check config files and exit");
  std::vector<std::string> val_paths;
  validate->add_option("files", val_paths, "Config JSON files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (list_presets) {
        for (const auto& n : preset_names()) std::printf("%s\n", n.c_str());
        return 0;
      }

      RunOptions opts;
      opts.output_dir = out_dir;
      opts.write_plots = plots;

      std::vector<RunJob> batch;
      if (all_presets) {
        for (const auto& n : preset_names())
          batch.push_back({preset_scenario(n), opts});
      } else if (!preset.empty()) {
        batch.push_back({preset_scenario(preset), opts});
      } else if (!scenario_path.empty()) {
        batch.push_back({load_scenario_config(scenario_path), opts});
      } else {
        std::fprintf(stderr,
                     "run: need --preset, --scenario or --all-presets\n");
        return 1;
      }
      for (auto& job : batch) {
        if (seed_opt->count() > 0) job.spec.seed = seed;
        if (dur_opt->count() > 0) job.spec.duration_s = duration;
      }

      if (!dump_config.empty()) {
        if (batch.size() != 1) {
          std::fprintf(stderr, "--dump-config needs exactly one scenario\n");
          return 1;
        }
        save_scenario_config(dump_config, batch.front().spec);
        std::printf("wrote %s\n", dump_config.c_str());
        return 0;
      }

      if (batch.size() == 1) {
        const RunResult res = run_scenario(batch.front().spec,
                                           batch.front().opts);
        if (res.exit_code != 0) {
          std::fprintf(stderr, "%s\n", res.fault_message.c_str());
          return res.exit_code;
        }
        std::printf("%s: %.1f s flown\n", batch.front().spec.name.c_str(),
                    res.summary.duration);
        std::printf("  log      %s\n", res.log_path.c_str());
        std::printf("  summary  %s\n", res.summary_path.c_str());
        for (const auto& p : res.plot_paths)
          std::printf("  plot     %s\n", p.c_str());
        return 0;
      }
      return run_batch(batch, jobs_n);
    }

    if (*identify) {
      std::vector<LogRecord> records;
      for (const auto& path : id_logs) {
        std::vector<LogRecord> part = read_log(path);
        records.insert(records.end(), part.begin(), part.end());
      }
      SegmentCriteria criteria;
      criteria.window_s = id_window;
      const IdentificationResult result =
          run_identification(records, criteria);
      const std::string report = identification_report(result);
      if (id_out.empty()) {
        std::printf("%s\n", report.c_str());
      } else {
        std::ofstream out(id_out);
        if (!out) {
          std::fprintf(stderr, "cannot write %s\n", id_out.c_str());
          return 1;
        }
        out << report << "\n";
        std::printf("wrote %s\n", id_out.c_str());
        const std::string dir =
            std::filesystem::path(id_out).parent_path().string();
        const auto plots = write_identification_plots(
            dir.empty() ? "." : dir, records, result);
        for (const auto& p : plots) std::printf("wrote %s\n", p.c_str());
      }
      return 0;
    }

    if (*plot) {
      const std::vector<LogRecord> records = read_log(plot_log);
      std::string stem = plot_stem;
      if (stem.empty()) {
        stem = std::filesystem::path(plot_log).stem().string();
        const std::string suffix = "_log";
        if (stem.size() > suffix.size() &&
            stem.compare(stem.size() - suffix.size(), suffix.size(),
                         suffix) == 0) {
          stem.resize(stem.size() - suffix.size());
        }
      }
      const auto paths = write_standard_plots(plot_out, stem, records);
      for (const auto& p : paths) std::printf("wrote %s\n", p.c_str());
      return paths.empty() ? 1 : 0;
    }

    if (*validate) {
      bool any_bad = false;
      for (const auto& path : val_paths) {
        const auto findings = validate_config_file(path);
        if (findings.empty()) {
          std::printf("%s: ok\n", path.c_str());
        } else {
          any_bad = true;
          for (const auto& f : findings)
            std::printf("%s\n", f.c_str());
        }
      }
      return any_bad ? 1 : 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
