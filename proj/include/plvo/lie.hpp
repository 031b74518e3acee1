#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "plvo/types.hpp"

namespace plvo {

/// Skew-symmetric matrix of v, such that skew(v) * u = v x u.
template <typename S>
Mat3<S> skew(const Vec3<S>& v) {
  Mat3<S> m;
  // clang-format off
  m <<  S(0),  -v.z(),  v.y(),
        v.z(),  S(0),  -v.x(),
       -v.y(),  v.x(),  S(0);
  // clang-format on
  return m;
}

/// Rodrigues rotation from an axis-angle vector w (angle = ||w||).
template <typename S>
Mat3<S> so3Exp(const Vec3<S>& w) {
  const S theta = w.norm();
  if (theta < S(1e-12)) {
    // First-order expansion; exact to O(theta^2).
    return Mat3<S>::Identity() + skew(w);
  }
  return Eigen::AngleAxis<S>(theta, w / theta).toRotationMatrix();
}

/// Axis-angle vector of a rotation matrix, angle in [0, pi].
template <typename S>
Vec3<S> so3Log(const Mat3<S>& R) {
  Eigen::AngleAxis<S> aa(R);
  return aa.angle() * aa.axis();
}

/// Left Jacobian of SO(3): exp(w + dw) ~ exp(Jl(w) dw) exp(w).
/// It also maps the translational twist component to the translation of
/// the SE(3) exponential.
template <typename S>
Mat3<S> so3LeftJacobian(const Vec3<S>& w) {
  const S theta2 = w.squaredNorm();
  const Mat3<S> W = skew(w);
  S c1, c2;  // coefficients of W and W^2
  if (theta2 < S(1e-12)) {
    c1 = S(0.5) - theta2 / S(24);
    c2 = S(1) / S(6) - theta2 / S(120);
  } else {
    const S theta = std::sqrt(theta2);
    c1 = (S(1) - std::cos(theta)) / theta2;
    c2 = (theta - std::sin(theta)) / (theta2 * theta);
  }
  return Mat3<S>::Identity() + c1 * W + c2 * W * W;
}

/// Inverse of the SO(3) left Jacobian.
template <typename S>
Mat3<S> so3LeftJacobianInverse(const Vec3<S>& w) {
  const S theta2 = w.squaredNorm();
  const Mat3<S> W = skew(w);
  S c;  // coefficient of W^2
  if (theta2 < S(1e-12)) {
    c = S(1) / S(12) + theta2 / S(720);
  } else {
    const S theta = std::sqrt(theta2);
    c = S(1) / theta2 -
        (S(1) + std::cos(theta)) / (S(2) * theta * std::sin(theta));
  }
  return Mat3<S>::Identity() - S(0.5) * W + c * W * W;
}

/// SE(3) exponential of a twist [v; w].
template <typename S>
Pose<S> se3Exp(const Twist<S>& xi) {
  const Vec3<S> v = xi.template head<3>();
  const Vec3<S> w = xi.template tail<3>();
  return Pose<S>(so3Exp(w), so3LeftJacobian(w) * v);
}

/// SE(3) logarithm. Throws std::domain_error when the rotation angle is
/// within 1e-6 of pi, where the axis is not recoverable; frame-to-frame
/// motions never get there, so an occurrence signals an upstream failure.
template <typename S>
Twist<S> se3Log(const Pose<S>& T) {
  Eigen::AngleAxis<S> aa(T.R);
  if (aa.angle() >= S(EIGEN_PI) - S(1e-6)) {
    throw std::domain_error("se3Log: rotation angle too close to pi");
  }
  const Vec3<S> w = aa.angle() * aa.axis();
  Twist<S> xi;
  xi.template head<3>() = so3LeftJacobianInverse(w) * T.t;
  xi.template tail<3>() = w;
  return xi;
}

/// Rotation angle of R in radians, in [0, pi].
template <typename S>
S rotationAngle(const Mat3<S>& R) {
  const S c = (R.trace() - S(1)) / S(2);
  return std::acos(std::min(S(1), std::max(S(-1), c)));
}

}  // namespace plvo
