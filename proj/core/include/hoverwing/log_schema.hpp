#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace hoverwing {

// One row per 500 Hz control tick. The table drives the struct, the CSV
// header, the writer and the reader, so the schema cannot drift apart.
// Flags are stored as 0/1, indices as small integers; everything is a
// double in the file.
#define HOVERWING_LOG_COLUMNS(X) \
  X(t)                           \
  X(pos_n) X(pos_e) X(pos_d)     \
  X(vel_n) X(vel_e) X(vel_d)     \
  X(qw) X(qx) X(qy) X(qz)        \
  X(phi) X(theta) X(psi)         \
  X(gyro_p) X(gyro_q) X(gyro_r)  \
  X(f_x) X(f_y) X(f_z)           \
  X(acc_n) X(acc_e) X(acc_d)     \
  X(acc_f_n) X(acc_f_e) X(acc_f_d) \
  X(acc_c_n) X(acc_c_e) X(acc_c_d) \
  X(acc_ref_n) X(acc_ref_e) X(acc_ref_d) \
  X(phi_ref) X(theta_ref) X(psi_ref) \
  X(psi_dot_ref) X(beta) X(f_y_f) \
  X(thrust_ref_inc) X(t_spec_f)  \
  X(u_cmd_0) X(u_cmd_1) X(u_cmd_2) X(u_cmd_3) \
  X(u_est_0) X(u_est_1) X(u_est_2) X(u_est_3) \
  X(u_act_0) X(u_act_1) X(u_act_2) X(u_act_3) \
  X(omega_ref_p) X(omega_ref_q) X(omega_ref_r) \
  X(omega_dot_f_p) X(omega_dot_f_q) X(omega_dot_f_r) \
  X(airspeed) X(airspeed_valid) X(alpha) \
  X(wind_n) X(wind_e) X(wind_d)  \
  X(guidance_mode) X(turn_engaged) X(element_index) X(on_line) \
  X(sat_mask) X(motor_floor) X(thrust_gate) X(near_singular) X(fault) \
  X(cross_track) X(lambda_field) X(v_desired) \
  X(k_eta_pitch)

struct LogRecord {
#define HOVERWING_LOG_DECL(name) double name{0.0};
  HOVERWING_LOG_COLUMNS(HOVERWING_LOG_DECL)
#undef HOVERWING_LOG_DECL
};

struct LogColumn {
  const char* name;
  double LogRecord::* field;
};

const std::vector<LogColumn>& log_columns();

/// Streaming CSV writer, one header row then "%.10g" cells. The fixed
/// format makes identical runs byte-identical.
class LogWriter {
 public:
  explicit LogWriter(const std::string& path);
  ~LogWriter();
  LogWriter(const LogWriter&) = delete;
  LogWriter& operator=(const LogWriter&) = delete;

  bool ok() const { return file_ != nullptr; }
  void write(const LogRecord& r);
  void close();

 private:
  std::FILE* file_{nullptr};
};

/// Loads a log, matching columns by header name (order-independent).
/// Throws std::runtime_error on unknown format.
std::vector<LogRecord> read_log(const std::string& path);

struct PhaseSummary {
  int element_index = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
  double rms_phi_err = 0.0;
  double rms_theta_err = 0.0;
  double rms_psi_err = 0.0;
  double rms_accel_err = 0.0;
  double rms_cross_track = 0.0;
};

struct ModeChange {
  double t = 0.0;
  int mode = 0;  // 0 direct, 1 fixed-wing turn engaged
};

struct RunSummary {
  double duration = 0.0;
  double rms_phi_err = 0.0;
  double rms_theta_err = 0.0;
  double rms_psi_err = 0.0;
  double rms_accel_err = 0.0;
  double rms_cross_track = 0.0;
  double sat_duty[4] = {0.0, 0.0, 0.0, 0.0};
  double max_alt_excursion = 0.0;
  double min_theta = 0.0;
  double max_theta = 0.0;
  double max_airspeed = 0.0;
  int faults = 0;
  std::vector<PhaseSummary> phases;
  std::vector<ModeChange> mode_changes;
};

/// Derived metrics, computed from the records alone so any consumer can
/// reproduce them from the CSV.
RunSummary summarize(const std::vector<LogRecord>& records);

std::string summary_to_json(const RunSummary& s);

}  // namespace hoverwing
