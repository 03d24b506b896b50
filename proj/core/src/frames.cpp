#include "hoverwing/frames.hpp"

namespace hoverwing {

double wrap_pi(double angle) {
  double a = std::fmod(angle + M_PI, 2.0 * M_PI);
  if (a <= 0.0) {
    a += 2.0 * M_PI;
  }
  return a - M_PI;
}

Quat Quat::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Quat Quat::operator*(const Quat& r) const {
  return {w * r.w - x * r.x - y * r.y - z * r.z,
          w * r.x + x * r.w + y * r.z - z * r.y,
          w * r.y - x * r.z + y * r.w + z * r.x,
          w * r.z + x * r.y - y * r.x + z * r.w};
}

Vec3 Quat::rotate(const Vec3& v) const {
  // q * [0, v] * q^-1, expanded.
  const Vec3 u(x, y, z);
  return v + 2.0 * u.cross(u.cross(v) + w * v);
}

Mat3 Quat::to_rotmat() const {
  Mat3 m;
  const double ww = w * w, xx = x * x, yy = y * y, zz = z * z;
  m << ww + xx - yy - zz, 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
      2.0 * (x * y + w * z), ww - xx + yy - zz, 2.0 * (y * z - w * x),
      2.0 * (x * z - w * y), 2.0 * (y * z + w * x), ww - xx - yy + zz;
  return m;
}

Mat3 rotmat_ned_from_body(const EulerZxy& eta) {
  const double cphi = std::cos(eta.phi), sphi = std::sin(eta.phi);
  const double cth = std::cos(eta.theta), sth = std::sin(eta.theta);
  const double cpsi = std::cos(eta.psi), spsi = std::sin(eta.psi);
  Mat3 m;
  m << cth * cpsi - sphi * sth * spsi, -cphi * spsi, sth * cpsi + sphi * cth * spsi,
      cth * spsi + sphi * sth * cpsi, cphi * cpsi, sth * spsi - sphi * cth * cpsi,
      -cphi * sth, sphi, cphi * cth;
  return m;
}

namespace {

Quat axis_quat(double half_angle, int axis) {
  Quat q;
  q.w = std::cos(half_angle);
  const double s = std::sin(half_angle);
  if (axis == 0) {
    q.x = s;
  } else if (axis == 1) {
    q.y = s;
  } else {
    q.z = s;
  }
  return q;
}

}  // namespace

Quat quat_from_euler_zxy(const EulerZxy& eta) {
  const Quat qz = axis_quat(0.5 * eta.psi, 2);
  const Quat qx = axis_quat(0.5 * eta.phi, 0);
  const Quat qy = axis_quat(0.5 * eta.theta, 1);
  return (qz * qx * qy).normalized();
}

EulerZxy euler_zxy_from_quat(const Quat& q, double psi_fallback) {
  const Mat3 m = q.normalized().to_rotmat();
  EulerZxy eta;
  const double s_phi = std::clamp(m(2, 1), -1.0, 1.0);
  eta.phi = std::asin(s_phi);
  if (std::abs(s_phi) > 1.0 - 1e-9) {
    // Gimbal lock at |phi| = 90 deg: psi and theta are coupled. Keep the
    // caller-provided yaw and recover theta against it.
    eta.psi = psi_fallback;
    // With phi = +-pi/2: m(0,2) = sth*cpsi +- cth*spsi = sin(theta +- psi).
    const double sum = std::atan2(m(0, 2), m(0, 0));
    eta.theta = s_phi > 0.0 ? wrap_pi(sum - psi_fallback) : wrap_pi(sum + psi_fallback);
  } else {
    eta.theta = std::atan2(-m(2, 0), m(2, 2));
    eta.psi = std::atan2(-m(0, 1), m(1, 1));
  }
  return eta;
}

Quat quat_error(const Quat& q_ref, const Quat& q_state) {
  // Body-frame shortest-path rotation from the current attitude to the
  // reference. With body-to-NED quaternions the state comes first; the
  // reversed product would express the error in world axes and cross the
  // axes badly at large attitude offsets.
  return (q_state.conjugate() * q_ref).normalized().canonical();
}

Quat quat_integrate(const Quat& q, const Vec3& omega_body, double dt) {
  const double angle = omega_body.norm() * dt;
  Quat dq;
  if (angle < 1e-12) {
    dq = {1.0, 0.5 * omega_body.x() * dt, 0.5 * omega_body.y() * dt,
          0.5 * omega_body.z() * dt};
  } else {
    const Vec3 axis = omega_body.normalized();
    const double s = std::sin(0.5 * angle);
    dq = {std::cos(0.5 * angle), axis.x() * s, axis.y() * s, axis.z() * s};
  }
  return (q * dq).normalized();
}

}  // namespace hoverwing
