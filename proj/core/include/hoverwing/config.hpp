#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoverwing/controller.hpp"
#include "hoverwing/guidance.hpp"
#include "hoverwing/simulator.hpp"

namespace hoverwing {

/// Thrown on malformed configuration; the message names the file and the
/// offending JSON path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Plant model plus its sensor suite, loaded together.
struct PlantSetup {
  PlantParams plant;
  SensorParams sensors;
};

/// One complete closed-loop run: controller, plant, environment, mission.
struct ScenarioSpec {
  std::string name = "scenario";
  ControllerConfig controller;
  PlantSetup setup;
  WindConfig wind;
  FlightPlan plan;
  PlantState initial;  // actuators are re-trimmed by the runner
  double duration_s = 30.0;
  std::uint64_t seed = 1;
};

/// Load a controller configuration. Every field is optional; omissions
/// keep the built-in defaults, unknown keys are rejected.
ControllerConfig load_vehicle_config(const std::string& path);
PlantSetup load_plant_config(const std::string& path);

/// Load a scenario. "vehicle" and "plant" entries may be inline objects
/// or paths relative to the scenario file.
ScenarioSpec load_scenario_config(const std::string& path);

void save_vehicle_config(const std::string& path, const ControllerConfig& cfg);
void save_plant_config(const std::string& path, const PlantSetup& setup);
void save_scenario_config(const std::string& path, const ScenarioSpec& spec);

/// Parse and sanity-check a config file of any kind (dispatch on "kind").
/// Returns human-readable findings; empty means the file is usable.
std::vector<std::string> validate_config_file(const std::string& path);

}  // namespace hoverwing
