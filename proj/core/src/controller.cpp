#include "hoverwing/controller.hpp"

#include <algorithm>
#include <cmath>

namespace hoverwing {

Controller::Controller(const ControllerConfig& cfg, FlightPlan plan)
    : cfg_(cfg),
      guidance_(cfg.guidance, std::move(plan)),
      outer_(cfg.outer),
      heading_(cfg.heading),
      attitude_(cfg.attitude),
      dt_(1.0 / cfg.attitude.sample_hz) {}

void Controller::reset(const SensorSnapshot& snap, const Vec4& u0) {
  OuterSensors os;
  os.accel_ned = snap.q.to_rotmat() * snap.accel_body +
                 Vec3(0.0, 0.0, cfg_.outer.schedule.gravity);
  os.q_state = snap.q;
  os.f_z = snap.accel_body(2);
  os.airspeed = snap.airspeed;
  os.u_f = u0;
  outer_.reset(os);

  const EulerZxy eta = euler_zxy_from_quat(snap.q, 0.0);
  heading_.reset(eta.psi, snap.accel_body(1));

  AttitudeSensors as;
  as.q_state = snap.q;
  as.gyro = snap.gyro;
  as.f_z = snap.accel_body(2);
  as.airspeed = snap.airspeed;
  as.airspeed_valid = snap.airspeed_valid;
  attitude_.reset(u0, as);
  initialized_ = true;
}

Vec4 Controller::step(const SensorSnapshot& snap, ControlDebug* dbg) {
  if (!initialized_) reset(snap, Vec4::Zero());
  const GuidanceOutput gd = guidance_.step(snap.gnss_pos, snap.gnss_vel, dt_);

  OuterSensors os;
  os.accel_ned = snap.q.to_rotmat() * snap.accel_body +
                 Vec3(0.0, 0.0, cfg_.outer.schedule.gravity);
  os.q_state = snap.q;
  os.f_z = snap.accel_body(2);
  os.airspeed = snap.airspeed;
  os.u_f = attitude_.filtered_actuators();

  OuterDebug od;
  const AttitudeSetpoint sp = outer_.step(os, gd.accel_ref, &od);

  // Heading: integrate the coordinated-turn rate in forward flight, track
  // the plan heading in hover, freeze when the plan has nothing to say.
  if (gd.hold_heading) {
    heading_.hold(snap.accel_body(1));
    if (gd.psi_plan_valid) {
      const double err = wrap_pi(gd.psi_plan - heading_.psi_ref());
      const double mx = cfg_.psi_slew_rate * dt_;
      heading_.set_psi_ref(heading_.psi_ref() + std::clamp(err, -mx, mx));
    }
  } else {
    heading_.step(snap.accel_body(1), sp.phi, sp.theta, snap.airspeed);
  }

  const Quat q_ref = reference_attitude(sp.phi, sp.theta, heading_.psi_ref());

  AttitudeSensors as;
  as.q_state = snap.q;
  as.gyro = snap.gyro;
  as.f_z = snap.accel_body(2);
  as.airspeed = snap.airspeed;
  as.airspeed_valid = snap.airspeed_valid;

  AttitudeCommand cmd;
  cmd.q_ref = q_ref;
  cmd.dT_d = sp.dT;

  AttitudeDebug ad;
  const Vec4 u_c = attitude_.step(as, cmd, &ad);

  if (dbg) {
    dbg->guidance = gd;
    dbg->outer = od;
    dbg->attitude = ad;
    dbg->setpoint = sp;
    dbg->q_ref = q_ref;
    dbg->psi_ref = heading_.psi_ref();
    dbg->psi_dot_ref = heading_.psi_dot_ref();
    dbg->beta = heading_.beta();
    dbg->f_y_f = heading_.f_y_filtered();
  }
  return u_c;
}

}  // namespace hoverwing
