#pragma once

#include "hoverwing/attitude_indi.hpp"
#include "hoverwing/guidance.hpp"
#include "hoverwing/sideslip.hpp"
#include "hoverwing/simulator.hpp"
#include "hoverwing/velocity_indi.hpp"

namespace hoverwing {

struct ControllerConfig {
  AttitudeIndiParams attitude;
  OuterLoopParams outer;
  HeadingRefParams heading;
  GuidanceGains guidance;
  double psi_slew_rate = 60.0 * M_PI / 180.0;  // rad/s, hover heading capture
};

/// Everything one control tick produces besides the actuator commands,
/// for logging and tests.
struct ControlDebug {
  GuidanceOutput guidance;
  OuterDebug outer;
  AttitudeDebug attitude;
  AttitudeSetpoint setpoint;
  Quat q_ref = Quat::identity();
  double psi_ref = 0.0;
  double psi_dot_ref = 0.0;
  double beta = 0.0;
  double f_y_f = 0.0;
};

/// Full control stack for one vehicle: guidance, acceleration loop,
/// heading reference, attitude/thrust loop, in that order every tick.
class Controller {
 public:
  Controller(const ControllerConfig& cfg, FlightPlan plan);

  void reset(const SensorSnapshot& snap, const Vec4& u0);

  Vec4 step(const SensorSnapshot& snap, ControlDebug* dbg = nullptr);

  const Guidance& guidance() const { return guidance_; }
  const ControllerConfig& config() const { return cfg_; }

 private:
  ControllerConfig cfg_;
  Guidance guidance_;
  VelocityIndi outer_;
  HeadingReference heading_;
  AttitudeIndi attitude_;
  double dt_;
  bool initialized_{false};
};

}  // namespace hoverwing
