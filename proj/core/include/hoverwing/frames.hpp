#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace hoverwing {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Wrap an angle to (-pi, pi].
double wrap_pi(double angle);

/// ZXY Euler angles: yaw about Z, then roll about X, then pitch about Y.
/// The singularity sits at |phi| = pi/2, so pitch may sweep the full
/// hover-to-forward-flight range without degeneracy.
struct EulerZxy {
  double phi{0.0};    // roll about body X [rad]
  double theta{0.0};  // pitch about body Y [rad]
  double psi{0.0};    // yaw about body Z [rad]
};

/// Unit quaternion, scalar-first. Represents the body-to-NED rotation.
struct Quat {
  double w{1.0};
  double x{0.0};
  double y{0.0};
  double z{0.0};

  static Quat identity() { return {}; }

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quat normalized() const;
  Quat conjugate() const { return {w, -x, -y, -z}; }

  /// Hamilton product.
  Quat operator*(const Quat& rhs) const;

  /// Rotate a body-frame vector into NED.
  Vec3 rotate(const Vec3& v) const;

  /// Vector part (x, y, z).
  Vec3 vec() const { return {x, y, z}; }

  /// Flip sign so w >= 0 (selects the short-way representation).
  Quat canonical() const { return w < 0.0 ? Quat{-w, -x, -y, -z} : *this; }

  Mat3 to_rotmat() const;
};

/// Rotation matrix from body axes to NED for the ZXY sequence,
/// equal to Rz(psi) * Rx(phi) * Ry(theta).
Mat3 rotmat_ned_from_body(const EulerZxy& eta);

/// Quaternion with the same rotation as rotmat_ned_from_body(eta).
Quat quat_from_euler_zxy(const EulerZxy& eta);

/// ZXY Euler extraction. Near the |phi| = pi/2 singularity yaw is not
/// observable; psi_fallback is reported there and theta recomputed
/// against it.
EulerZxy euler_zxy_from_quat(const Quat& q, double psi_fallback = 0.0);

/// Body-frame attitude error q_state* (x) q_ref, canonicalized to w >= 0.
Quat quat_error(const Quat& q_ref, const Quat& q_state);

/// Incremental rotation by body rates omega over dt (quaternion exp map).
Quat quat_integrate(const Quat& q, const Vec3& omega_body, double dt);

/// Frame-tagged 3-vectors. Arithmetic is only defined within a frame;
/// mixing NED and body quantities fails to compile.
template <typename Tag>
struct FrameVec {
  Vec3 v{Vec3::Zero()};

  FrameVec() = default;
  explicit FrameVec(const Vec3& in) : v(in) {}
  FrameVec(double a, double b, double c) : v(a, b, c) {}

  FrameVec operator+(const FrameVec& o) const { return FrameVec{Vec3(v + o.v)}; }
  FrameVec operator-(const FrameVec& o) const { return FrameVec{Vec3(v - o.v)}; }
  FrameVec operator*(double s) const { return FrameVec{Vec3(v * s)}; }
  FrameVec& operator+=(const FrameVec& o) {
    v += o.v;
    return *this;
  }
  double norm() const { return v.norm(); }
};

struct NedTag {};
struct BodyTag {};
using NedVec = FrameVec<NedTag>;
using BodyVec = FrameVec<BodyTag>;

inline NedVec to_ned(const Quat& q_ned_from_body, const BodyVec& b) {
  return NedVec{q_ned_from_body.rotate(b.v)};
}
inline BodyVec to_body(const Quat& q_ned_from_body, const NedVec& n) {
  return BodyVec{q_ned_from_body.conjugate().rotate(n.v)};
}

}  // namespace hoverwing
