#include "hoverwing/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hoverwing {

namespace {

double horiz_norm(const Vec3& v) { return std::hypot(v(0), v(1)); }

Vec3 cap_horiz(Vec3 a, double a_max) {
  const double h = horiz_norm(a);
  if (h > a_max) {
    a(0) *= a_max / h;
    a(1) *= a_max / h;
  }
  a(2) = std::clamp(a(2), -a_max, a_max);
  return a;
}

}  // namespace

Vec3 pd_accel_ref(const Vec3& xi_ref, const Vec3& xi, const Vec3& xi_dot,
                  const GuidanceGains& g) {
  return ((xi_ref - xi) * g.k_xi - xi_dot) * g.k_xi_dot;
}

double approach_speed_limit(double d, double a_max) {
  return std::sqrt(2.0 * std::max(d, 0.0) * a_max);
}

TurnMode select_turn_mode(double v_current, double v_desired,
                          const GuidanceGains& g) {
  const bool turn =
      v_current > g.turn_speed_current && v_desired > g.turn_speed_desired;
  return turn ? TurnMode::kFixedWingTurn : TurnMode::kDirect;
}

LineField line_vector(const Vec3& p, const Vec3& start, const Vec3& end) {
  LineField f;
  const double dn = end(0) - start(0);
  const double de = end(1) - start(1);
  const double len = std::hypot(dn, de);
  if (len < 1e-9) {
    // Degenerate line: point straight at the endpoint.
    const double bn = end(0) - p(0), be = end(1) - p(1);
    const double d = std::hypot(bn, be);
    f.dir = d > 1e-9 ? Vec3(bn / d, be / d, 0.0) : Vec3::UnitX();
    f.along_remaining = d;
    f.z_des = end(2);
    return f;
  }
  const double tn = dn / len, te = de / len;
  const double rn = p(0) - start(0), re = p(1) - start(1);
  const double along = rn * tn + re * te;
  // Positive cross-track = left of the travel direction.
  f.cross_track = rn * te - re * tn;
  f.along_remaining = len - along;
  const double s = std::clamp(along / len, 0.0, 1.0);
  f.z_des = start(2) + s * (end(2) - start(2));

  const double d = std::abs(f.cross_track);
  f.lambda = std::atan((d + 0.05 * d * d) / 50.0);
  // Left of the line steers right (course angle grows clockwise from
  // North), so the field rotates by +lambda when cross_track > 0.
  const double chi = std::atan2(te, tn) + std::copysign(f.lambda, f.cross_track);
  f.dir = Vec3(std::cos(chi), std::sin(chi), 0.0);
  return f;
}

Vec3 fixed_wing_turn_ref(const Vec3& vel, double target_course,
                         double v_desired, const GuidanceGains& g) {
  const double vh = horiz_norm(vel);
  if (vh < 0.1) return Vec3::Zero();
  const double chi = std::atan2(vel(1), vel(0));
  const double dchi = wrap_pi(target_course - chi);
  const double tn = vel(0) / vh, te = vel(1) / vh;
  // +90 deg of the track direction; acceleration along it raises the
  // course angle.
  const double nn = -te, ne = tn;
  const double a_lat = std::clamp(g.turn_gain * dchi * vh, -g.a_max, g.a_max);
  const double a_tan =
      std::clamp(g.k_xi_dot * (v_desired - vh), -g.a_max, g.a_max);
  Vec3 a(a_tan * tn + a_lat * nn, a_tan * te + a_lat * ne, 0.0);
  const double n = horiz_norm(a);
  if (n > g.a_max) {
    a(0) *= g.a_max / n;
    a(1) *= g.a_max / n;
  }
  return a;
}

Guidance::Guidance(const GuidanceGains& gains, FlightPlan plan)
    : gains_(gains), plan_(std::move(plan)) {}

bool Guidance::complete() const {
  return index_ >= static_cast<int>(plan_.elements.size());
}

const PlanElement& Guidance::current() const {
  static const PlanElement kEmpty{};
  if (plan_.elements.empty()) return kEmpty;
  const int i = std::min(index_, static_cast<int>(plan_.elements.size()) - 1);
  return plan_.elements[i];
}

bool Guidance::element_done(const PlanElement& e, const Vec3& pos,
                            const Vec3& /*vel*/, double dt) {
  switch (e.type) {
    case ElementType::kHover: {
      if (e.hold_s < 0.0) return false;
      if ((pos - e.point).norm() < gains_.hover_accept_radius) {
        hover_timer_ += dt;
      }
      return hover_timer_ >= e.hold_s;
    }
    case ElementType::kGotoWaypoint:
      return (pos - e.point).norm() < gains_.wp_accept_radius;
    case ElementType::kFollowLine: {
      const LineField f = line_vector(pos, e.point, e.end);
      return f.along_remaining <= 0.0 ||
             f.along_remaining < gains_.line_switch_dist;
    }
  }
  return false;
}

Vec3 Guidance::capped_accel(const Vec3& v_des, const Vec3& vel) const {
  return cap_horiz((v_des - vel) * gains_.k_xi_dot, gains_.a_max);
}

GuidanceOutput Guidance::step(const Vec3& pos, const Vec3& vel, double dt) {
  GuidanceOutput out;
  if (plan_.elements.empty()) {
    out.plan_complete = true;
    out.hold_heading = true;
    out.accel_ref = capped_accel(Vec3::Zero(), vel);
    return out;
  }

  while (!complete() && element_done(plan_.elements[index_], pos, vel, dt)) {
    ++index_;
    hover_timer_ = 0.0;
  }
  out.plan_complete = complete();
  out.element_index = std::min(index_, static_cast<int>(plan_.elements.size()) - 1);
  const PlanElement& e = plan_.elements[out.element_index];

  const double vh = horiz_norm(vel);

  if (e.type == ElementType::kFollowLine && !out.plan_complete) {
    const LineField f = line_vector(pos, e.point, e.end);
    out.on_line = true;
    out.cross_track = f.cross_track;
    out.lambda = f.lambda;
    out.dist_to_target = f.along_remaining;
    out.v_desired = e.speed > 0.0 ? e.speed : gains_.default_speed;
    out.mode = select_turn_mode(vh, out.v_desired, gains_);

    const double chi_field = std::atan2(f.dir(1), f.dir(0));
    const double chi = std::atan2(vel(1), vel(0));
    out.turn_engaged = out.mode == TurnMode::kFixedWingTurn &&
                       std::abs(wrap_pi(chi_field - chi)) > gains_.turn_deadband_rad;

    Vec3 a;
    if (out.turn_engaged) {
      a = fixed_wing_turn_ref(vel, chi_field, out.v_desired, gains_);
    } else {
      const Vec3 v_des = f.dir * out.v_desired;
      a = (v_des - Vec3(vel(0), vel(1), 0.0)) * gains_.k_xi_dot;
    }
    a(2) = ((f.z_des - pos(2)) * gains_.k_xi - vel(2)) * gains_.k_xi_dot;
    out.accel_ref = cap_horiz(a, gains_.a_max);
    return out;
  }

  // Hover and waypoint targets share the approach law; a completed plan
  // parks at the last target.
  const Vec3 target = e.type == ElementType::kFollowLine ? e.end : e.point;
  const Vec3 to_go = target - pos;
  const double d_h = horiz_norm(to_go);
  out.dist_to_target = to_go.norm();

  double v_cap = gains_.approach_limit
                     ? approach_speed_limit(d_h, gains_.a_max)
                     : std::numeric_limits<double>::infinity();
  if (e.type == ElementType::kHover || out.plan_complete) {
    v_cap = std::min(v_cap, gains_.hover_speed_max);
    out.hold_heading = true;
    out.psi_plan_valid = e.type == ElementType::kHover;
    out.psi_plan = e.heading;
  } else {
    const double leg = e.speed > 0.0 ? e.speed : gains_.default_speed;
    v_cap = std::min(v_cap, leg);
  }
  out.v_desired = v_cap;

  Vec3 v_des = Vec3::Zero();
  double v_pd = gains_.k_xi * d_h;
  if (d_h > 1e-9) {
    const double v_mag = std::min(v_pd, v_cap);
    v_des(0) = to_go(0) / d_h * v_mag;
    v_des(1) = to_go(1) / d_h * v_mag;
  }
  v_des(2) = std::clamp(gains_.k_xi * to_go(2), -gains_.hover_speed_max,
                        gains_.hover_speed_max);

  out.mode = select_turn_mode(vh, v_cap, gains_);
  if (!out.hold_heading && out.mode == TurnMode::kFixedWingTurn && d_h > 1e-9) {
    const double chi_target = std::atan2(to_go(1), to_go(0));
    const double chi = std::atan2(vel(1), vel(0));
    if (std::abs(wrap_pi(chi_target - chi)) > gains_.turn_deadband_rad) {
      out.turn_engaged = true;
      Vec3 a = fixed_wing_turn_ref(vel, chi_target, v_cap, gains_);
      a(2) = (v_des(2) - vel(2)) * gains_.k_xi_dot;
      out.accel_ref = cap_horiz(a, gains_.a_max);
      return out;
    }
  }

  out.accel_ref = capped_accel(v_des, vel);
  return out;
}

}  // namespace hoverwing
