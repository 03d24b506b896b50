#pragma once

#include <cmath>
#include <vector>

#include "hoverwing/frames.hpp"

namespace hoverwing {

struct GuidanceGains {
  double k_xi = 0.7;      // 1/s, position to desired velocity
  double k_xi_dot = 1.4;  // 1/s, velocity error to acceleration
  double a_max = 2.0;     // m/s^2, reference acceleration cap

  // Turn-mode thresholds: flown speed and commanded speed both have to be
  // past these before a coordinated turn is preferred over direct
  // acceleration toward the target.
  double turn_speed_current = 10.0;  // m/s
  double turn_speed_desired = 14.0;  // m/s
  double turn_gain = 1.0;            // 1/s, course-error to turn rate
  double turn_deadband_rad = 15.0 * M_PI / 180.0;

  // Cap approach speed at sqrt(2 d a_max) so the deceleration toward a
  // stop fits within a_max. Disabling it shows the overshoot it prevents.
  bool approach_limit = true;

  double line_switch_dist = 20.0;  // m before the endpoint
  double wp_accept_radius = 5.0;   // m
  double hover_accept_radius = 2.0;
  double hover_speed_max = 5.0;  // m/s repositioning cap
  double default_speed = 16.0;   // m/s when a leg gives none
};

enum class TurnMode { kDirect, kFixedWingTurn };

/// Position PD producing an acceleration reference (pre-limiting).
Vec3 pd_accel_ref(const Vec3& xi_ref, const Vec3& xi, const Vec3& xi_dot,
                  const GuidanceGains& g);

/// Speed that can still be scrubbed off within d meters at a_max.
double approach_speed_limit(double d, double a_max);

TurnMode select_turn_mode(double v_current, double v_desired,
                          const GuidanceGains& g);

/// Ground-velocity vector field of a line segment. The field direction
/// turns from the along-track course toward the line as the cross-track
/// distance grows, saturating short of perpendicular.
struct LineField {
  Vec3 dir = Vec3::UnitX();  // horizontal unit, z = 0
  double lambda = 0.0;       // field rotation, rad
  double cross_track = 0.0;  // signed, positive left of the line
  double along_remaining = 0.0;  // m to the endpoint, along track
  double z_des = 0.0;            // interpolated line altitude
};
LineField line_vector(const Vec3& p, const Vec3& start, const Vec3& end);

/// Horizontal acceleration for a constant-speed course capture: lateral
/// turn component plus tangential speed hold, capped at a_max.
Vec3 fixed_wing_turn_ref(const Vec3& vel, double target_course,
                         double v_desired, const GuidanceGains& g);

enum class ElementType { kHover, kGotoWaypoint, kFollowLine };

struct PlanElement {
  ElementType type = ElementType::kHover;
  Vec3 point = Vec3::Zero();  // hover/waypoint target, or line start
  Vec3 end = Vec3::Zero();    // line end
  double heading = 0.0;       // rad, hover elements
  double speed = 0.0;         // m/s, 0 = element default
  double hold_s = 0.0;        // hover dwell; negative = hold forever
};

struct FlightPlan {
  std::vector<PlanElement> elements;
};

struct GuidanceOutput {
  Vec3 accel_ref = Vec3::Zero();
  TurnMode mode = TurnMode::kDirect;
  bool turn_engaged = false;  // mode selected and course error past deadband
  bool hold_heading = false;  // heading should stop integrating
  bool psi_plan_valid = false;  // psi_plan carries a commanded heading
  double psi_plan = 0.0;
  double v_desired = 0.0;
  int element_index = 0;
  bool plan_complete = false;
  bool on_line = false;  // cross_track/lambda are live this tick
  double cross_track = 0.0;
  double lambda = 0.0;
  double dist_to_target = 0.0;
};

/// Flight-plan sequencer and acceleration-reference generator.
class Guidance {
 public:
  Guidance(const GuidanceGains& gains, FlightPlan plan);

  GuidanceOutput step(const Vec3& pos, const Vec3& vel, double dt);

  int element_index() const { return index_; }
  bool complete() const;
  const FlightPlan& plan() const { return plan_; }

 private:
  const PlanElement& current() const;
  bool element_done(const PlanElement& e, const Vec3& pos, const Vec3& vel,
                    double dt);
  Vec3 capped_accel(const Vec3& v_des, const Vec3& vel) const;

  GuidanceGains gains_;
  FlightPlan plan_;
  int index_{0};
  double hover_timer_{0.0};
};

}  // namespace hoverwing
