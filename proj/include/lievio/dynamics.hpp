#pragma once

#include <functional>

#include "lievio/lie_group.hpp"

namespace lievio {

/// One gyroscope + accelerometer sample, body frame.
struct ImuSample {
  Vec3 omega = Vec3::Zero();  // rad/s
  Vec3 accel = Vec3::Zero();  // m/s^2, apparent (non-gravitational)
  double t = 0.0;
};

/// Unpacked physical state: rigid body pose/velocity, gravity, and n
/// static landmark columns.
struct RigidBodyState {
  Rotation rot;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 g = Vec3(0.0, 0.0, -9.81);
  Mat3X landmarks = Mat3X(3, 0);
  double t = 0.0;

  int n() const { return static_cast<int>(landmarks.cols()); }

  GroupElement as_group() const {
    return GroupElement(rot, p, v, g, landmarks);
  }
};

/// The constant matrices H (full) and S (shift block) of the group-form
/// dynamics Xdot = [X, H] + X V.
struct StructureConstants {
  MatX h;
  MatX s;
};

inline StructureConstants build_structure(int n) {
  StructureConstants sc;
  sc.s = MatX::Zero(3 + n, 3 + n);
  sc.s(1, 0) = 1.0;  // S e1 = e2
  sc.s(2, 1) = 1.0;  // S e2 = e3
  sc.h = MatX::Zero(6 + n, 6 + n);
  sc.h.bottomRightCorner(3 + n, 3 + n) = sc.s;
  return sc;
}

/// Group velocity V([w]_x, 0, a, 0, 0) fed by the IMU.
inline TangentElement build_group_velocity(const ImuSample& imu, int n) {
  return TangentElement(imu.omega, Vec3::Zero(), imu.accel, Vec3::Zero(),
                        Mat3X::Zero(3, n));
}

struct StateDerivative {
  Mat3 rot_dot;
  Vec3 p_dot;
  Vec3 v_dot;
  Vec3 g_dot;
  // landmark derivatives are identically zero
};

/// Rdot = R[w]_x, pdot = v, vdot = g + R a, gdot = 0.
inline StateDerivative derivative_component(const RigidBodyState& s,
                                            const ImuSample& imu) {
  StateDerivative d;
  d.rot_dot = s.rot.matrix() * skew(imu.omega);
  d.p_dot = s.v;
  d.v_dot = s.g + s.rot.matrix() * imu.accel;
  d.g_dot = Vec3::Zero();
  return d;
}

/// Embedded form of Xdot = [X, H] + X V.
inline MatX derivative_group(const GroupElement& x, const TangentElement& vel,
                             const StructureConstants& sc) {
  if (x.n() != vel.n() || sc.h.rows() != 6 + x.n()) {
    throw DimensionMismatch("derivative_group: inconsistent landmark count");
  }
  const MatX xe = x.embed();
  return xe * sc.h - sc.h * xe + xe * vel.embed();
}

namespace detail {

/// RK4 for pdot = v, vdot = accel(tau) with tau relative to step start.
inline void rk4_pv(Vec3& p, Vec3& v, double dt,
                   const std::function<Vec3(double)>& accel) {
  const Vec3 a0 = accel(0.0);
  const Vec3 am = accel(0.5 * dt);
  const Vec3 a1 = accel(dt);

  const Vec3 k1p = v, k1v = a0;
  const Vec3 k2p = v + 0.5 * dt * k1v, k2v = am;
  const Vec3 k3p = v + 0.5 * dt * k2v, k3v = am;
  const Vec3 k4p = v + dt * k3v, k4v = a1;

  p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

}  // namespace detail

/// One integration step under zero-order-hold IMU: exact exponential for
/// the rotation, RK4 on (p, v). Gravity and landmarks are untouched.
inline RigidBodyState integrate_step(const RigidBodyState& s, const ImuSample& imu,
                                     double dt) {
  RigidBodyState out = s;
  const Mat3 r0 = s.rot.matrix();
  detail::rk4_pv(out.p, out.v, dt, [&](double tau) -> Vec3 {
    return s.g + (r0 * exp_so3(tau * imu.omega).matrix()) * imu.accel;
  });
  out.rot = s.rot * exp_so3(dt * imu.omega);
  out.t = s.t + dt;
  return out;
}

}  // namespace lievio
