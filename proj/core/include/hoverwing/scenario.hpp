#pragma once

#include <string>
#include <vector>

#include "hoverwing/config.hpp"
#include "hoverwing/log_schema.hpp"

namespace hoverwing {

struct RunOptions {
  std::string output_dir = ".";
  bool write_log = true;
  bool write_summary = true;
  bool write_plots = false;
  bool keep_records = true;  // retain the rows in memory for callers
};

struct RunResult {
  int exit_code = 0;  // 0 nominal, 2 numerical fault mid-run
  std::string fault_message;
  RunSummary summary;
  std::vector<LogRecord> records;
  std::string log_path;
  std::string summary_path;
  std::vector<std::string> plot_paths;
};

/// Close the loop: sense, control, log, integrate, for the scenario
/// duration. A non-finite plant state or controller fault aborts with
/// exit code 2 and a state dump in fault_message.
RunResult run_scenario(const ScenarioSpec& spec, const RunOptions& opts);

/// Built-in missions covering hover, transition, cruise tracking, turns
/// and wind rejection.
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
ScenarioSpec preset_scenario(const std::string& name);

}  // namespace hoverwing
