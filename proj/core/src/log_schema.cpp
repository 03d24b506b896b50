#include "hoverwing/log_schema.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "hoverwing/frames.hpp"

namespace hoverwing {

const std::vector<LogColumn>& log_columns() {
  static const std::vector<LogColumn> cols = {
#define HOVERWING_LOG_COL(name) {#name, &LogRecord::name},
      HOVERWING_LOG_COLUMNS(HOVERWING_LOG_COL)
#undef HOVERWING_LOG_COL
  };
  return cols;
}

LogWriter::LogWriter(const std::string& path) {
  file_ = std::fopen(path.c_str(), "w");
  if (!file_) return;
  const auto& cols = log_columns();
  for (size_t i = 0; i < cols.size(); ++i) {
    std::fputs(cols[i].name, file_);
    std::fputc(i + 1 < cols.size() ? ',' : '\n', file_);
  }
}

LogWriter::~LogWriter() { close(); }

void LogWriter::close() {
  if (file_) {
    std::fclose(file_);
    file_ = nullptr;
  }
}

void LogWriter::write(const LogRecord& r) {
  if (!file_) return;
  const auto& cols = log_columns();
  for (size_t i = 0; i < cols.size(); ++i) {
    std::fprintf(file_, "%.10g", r.*(cols[i].field));
    std::fputc(i + 1 < cols.size() ? ',' : '\n', file_);
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
    out.back().pop_back();
  }
  return out;
}

}  // namespace

std::vector<LogRecord> read_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open log: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty log: " + path);
  const auto header = split_csv(line);

  // Map file columns onto struct fields by name; unknown names are an
  // error, missing ones stay at their defaults.
  const auto& cols = log_columns();
  std::vector<double LogRecord::*> fields(header.size(), nullptr);
  for (size_t i = 0; i < header.size(); ++i) {
    for (const auto& c : cols) {
      if (header[i] == c.name) {
        fields[i] = c.field;
        break;
      }
    }
    if (!fields[i]) {
      throw std::runtime_error("unknown log column '" + header[i] + "' in " +
                               path);
    }
  }

  std::vector<LogRecord> records;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    LogRecord r;
    const char* p = line.c_str();
    for (size_t i = 0; i < fields.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) {
        throw std::runtime_error("bad number at " + path + ":" +
                                 std::to_string(line_no));
      }
      r.*(fields[i]) = v;
      p = (*end == ',') ? end + 1 : end;
    }
    records.push_back(r);
  }
  return records;
}

RunSummary summarize(const std::vector<LogRecord>& records) {
  RunSummary s;
  if (records.empty()) return s;

  s.duration = records.back().t - records.front().t;
  s.min_theta = records.front().theta;
  s.max_theta = records.front().theta;
  const double alt0 = records.front().pos_d;

  double sum_phi = 0.0, sum_theta = 0.0, sum_psi = 0.0, sum_acc = 0.0;
  double sum_ct = 0.0;
  size_t n_ct = 0;
  size_t sat_count[4] = {0, 0, 0, 0};
  int last_mode = -1;
  int phase_elem = -1;

  auto flush_phase = [&s](PhaseSummary& ph, size_t n, size_t n_line) {
    if (n == 0) return;
    ph.rms_phi_err = std::sqrt(ph.rms_phi_err / n);
    ph.rms_theta_err = std::sqrt(ph.rms_theta_err / n);
    ph.rms_psi_err = std::sqrt(ph.rms_psi_err / n);
    ph.rms_accel_err = std::sqrt(ph.rms_accel_err / n);
    ph.rms_cross_track =
        n_line ? std::sqrt(ph.rms_cross_track / n_line) : 0.0;
    s.phases.push_back(ph);
  };

  PhaseSummary ph;
  size_t ph_n = 0, ph_nline = 0;

  for (const auto& r : records) {
    const double e_phi = wrap_pi(r.phi - r.phi_ref);
    const double e_theta = wrap_pi(r.theta - r.theta_ref);
    const double e_psi = wrap_pi(r.psi - r.psi_ref);
    const double e_acc = std::sqrt(
        (r.acc_ref_n - r.acc_f_n) * (r.acc_ref_n - r.acc_f_n) +
        (r.acc_ref_e - r.acc_f_e) * (r.acc_ref_e - r.acc_f_e) +
        (r.acc_ref_d - r.acc_f_d) * (r.acc_ref_d - r.acc_f_d));

    sum_phi += e_phi * e_phi;
    sum_theta += e_theta * e_theta;
    sum_psi += e_psi * e_psi;
    sum_acc += e_acc * e_acc;
    if (r.on_line != 0.0) {
      sum_ct += r.cross_track * r.cross_track;
      ++n_ct;
    }

    const int mask = static_cast<int>(r.sat_mask);
    for (int i = 0; i < 4; ++i) {
      if (mask & (1 << i)) ++sat_count[i];
    }

    s.min_theta = std::min(s.min_theta, r.theta);
    s.max_theta = std::max(s.max_theta, r.theta);
    s.max_airspeed = std::max(s.max_airspeed, r.airspeed);
    s.max_alt_excursion =
        std::max(s.max_alt_excursion, std::abs(r.pos_d - alt0));
    if (r.fault != 0.0) ++s.faults;

    const int mode = static_cast<int>(r.turn_engaged);
    if (mode != last_mode) {
      s.mode_changes.push_back({r.t, mode});
      last_mode = mode;
    }

    const int elem = static_cast<int>(r.element_index);
    if (elem != phase_elem) {
      flush_phase(ph, ph_n, ph_nline);
      ph = PhaseSummary{};
      ph.element_index = elem;
      ph.t_begin = r.t;
      ph_n = 0;
      ph_nline = 0;
      phase_elem = elem;
    }
    ph.t_end = r.t;
    ph.rms_phi_err += e_phi * e_phi;
    ph.rms_theta_err += e_theta * e_theta;
    ph.rms_psi_err += e_psi * e_psi;
    ph.rms_accel_err += e_acc * e_acc;
    if (r.on_line != 0.0) {
      ph.rms_cross_track += r.cross_track * r.cross_track;
      ++ph_nline;
    }
    ++ph_n;
  }
  flush_phase(ph, ph_n, ph_nline);

  const double n = static_cast<double>(records.size());
  s.rms_phi_err = std::sqrt(sum_phi / n);
  s.rms_theta_err = std::sqrt(sum_theta / n);
  s.rms_psi_err = std::sqrt(sum_psi / n);
  s.rms_accel_err = std::sqrt(sum_acc / n);
  s.rms_cross_track = n_ct ? std::sqrt(sum_ct / n_ct) : 0.0;
  for (int i = 0; i < 4; ++i) {
    s.sat_duty[i] = static_cast<double>(sat_count[i]) / n;
  }
  return s;
}

std::string summary_to_json(const RunSummary& s) {
  nlohmann::json j;
  j["schema"] = 1;
  j["duration_s"] = s.duration;
  j["rms"] = {{"phi_rad", s.rms_phi_err},
              {"theta_rad", s.rms_theta_err},
              {"psi_rad", s.rms_psi_err},
              {"accel_mps2", s.rms_accel_err},
              {"cross_track_m", s.rms_cross_track}};
  j["saturation_duty"] = {s.sat_duty[0], s.sat_duty[1], s.sat_duty[2],
                          s.sat_duty[3]};
  j["max_alt_excursion_m"] = s.max_alt_excursion;
  j["theta_range_rad"] = {s.min_theta, s.max_theta};
  j["max_airspeed_mps"] = s.max_airspeed;
  j["faults"] = s.faults;

  nlohmann::json phases = nlohmann::json::array();
  for (const auto& p : s.phases) {
    phases.push_back({{"element", p.element_index},
                      {"t_begin", p.t_begin},
                      {"t_end", p.t_end},
                      {"rms_phi_rad", p.rms_phi_err},
                      {"rms_theta_rad", p.rms_theta_err},
                      {"rms_psi_rad", p.rms_psi_err},
                      {"rms_accel_mps2", p.rms_accel_err},
                      {"rms_cross_track_m", p.rms_cross_track}});
  }
  j["phases"] = phases;

  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : s.mode_changes) {
    modes.push_back({{"t", m.t}, {"turn", m.mode}});
  }
  j["mode_timeline"] = modes;
  return j.dump(2) + "\n";
}

}  // namespace hoverwing
