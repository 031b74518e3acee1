#pragma once

#include <stdexcept>

#include "plvo/lie.hpp"
#include "plvo/types.hpp"

namespace plvo {

/// Line through two homogeneous points: n = Xs x Xe over the inhomogeneous
/// parts, d = w2 Xs - w1 Xe. Throws std::domain_error when the points
/// coincide projectively (d = 0).
template <typename S>
PluckerLine<S> pluckerFromEndpoints(const Vec4<S>& XsH, const Vec4<S>& XeH) {
  const Vec3<S> Xs = XsH.template head<3>();
  const Vec3<S> Xe = XeH.template head<3>();
  PluckerLine<S> line(Xs.cross(Xe), XeH.w() * Xs - XsH.w() * Xe);
  if (line.d.squaredNorm() < S(1e-24)) {
    throw std::domain_error("pluckerFromEndpoints: coincident endpoints");
  }
  return line;
}

/// Convenience overload for finite 3D endpoints (w = 1), so d = Xs - Xe.
template <typename S>
PluckerLine<S> pluckerFromEndpoints(const Vec3<S>& Xs, const Vec3<S>& Xe) {
  return pluckerFromEndpoints(Vec4<S>(Xs.x(), Xs.y(), Xs.z(), S(1)),
                              Vec4<S>(Xe.x(), Xe.y(), Xe.z(), S(1)));
}

/// 4x4 dual matrix form [[skew(d), n], [-n^T, 0]] of a line.
template <typename S>
Mat4<S> pluckerDualMatrix(const PluckerLine<S>& line) {
  Mat4<S> m = Mat4<S>::Zero();
  m.template topLeftCorner<3, 3>() = skew(line.d);
  m.template topRightCorner<3, 1>() = line.n;
  m.template bottomLeftCorner<1, 3>() = -line.n.transpose();
  return m;
}

/// Inverse of pluckerDualMatrix: reads (n, d) back out of the block layout.
template <typename S>
PluckerLine<S> pluckerFromDualMatrix(const Mat4<S>& m) {
  return PluckerLine<S>(m.template topRightCorner<3, 1>(),
                        Vec3<S>(m(2, 1), m(0, 2), m(1, 0)));
}

/// Rigid transform of a line by T: p' = R p + t. With the endpoint
/// convention d = Xs - Xe the moment maps as n' = R n - skew(t) R d, which
/// is exactly what transforming the endpoints and rebuilding yields.
template <typename S>
PluckerLine<S> transformLine(const PluckerLine<S>& line, const Pose<S>& T) {
  const Vec3<S> Rd = T.R * line.d;
  return PluckerLine<S>(T.R * line.n - T.t.cross(Rd), Rd);
}

/// Pixel-coordinate coefficients (l1, l2, l3) of the image of the infinite
/// line: only the normal component carries projective information, so
/// l' = K n with K built from the intrinsics.
template <typename S>
Vec3<S> projectLine(const PluckerLine<S>& line, const CameraModel<S>& cam) {
  Mat3<S> K;
  // clang-format off
  K << cam.fy,           S(0),             S(0),
       S(0),             cam.fx,           S(0),
      -cam.fy * cam.cx, -cam.fx * cam.cy,  cam.fx * cam.fy;
  // clang-format on
  return K * line.n;
}

/// A projected line with l1^2 + l2^2 below eps^2 passes through the optical
/// center and has no usable image direction; callers skip it.
template <typename S>
bool lineProjectionDegenerate(const Vec3<S>& l,
                              S eps = S(kDefaultLineProjEps)) {
  return l.template head<2>().squaredNorm() < eps * eps;
}

/// Signed pixel distance from pixel p to the projected line l.
template <typename S>
S pointLineDistance(const Vec2<S>& p, const Vec3<S>& l) {
  return (p.x() * l.x() + p.y() * l.y() + l.z()) /
         l.template head<2>().norm();
}

}  // namespace plvo
