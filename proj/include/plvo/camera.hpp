#pragma once

#include <stdexcept>

#include "plvo/types.hpp"

namespace plvo {

/// Pinhole projection of a camera-frame point into left-image pixels.
/// Throws std::domain_error when the point is at or behind the principal
/// plane (z <= zMin).
template <typename S>
Vec2<S> projectPoint(const Vec3<S>& p, const CameraModel<S>& cam,
                     S zMin = S(kDefaultZMin)) {
  if (p.z() <= zMin) {
    throw std::domain_error("projectPoint: point behind camera");
  }
  return Vec2<S>(cam.fx * p.x() / p.z() + cam.cx,
                 cam.fy * p.y() / p.z() + cam.cy);
}

/// Projection into the right camera of the rectified pair (its center is
/// at +baseline along the left camera's x axis).
template <typename S>
Vec2<S> projectPointRight(const Vec3<S>& p, const CameraModel<S>& cam,
                          S zMin = S(kDefaultZMin)) {
  return projectPoint(Vec3<S>(p.x() - cam.baseline, p.y(), p.z()), cam, zMin);
}

/// Depth from a rectified stereo observation: z = fx b / (uL - uR),
/// back-projected through the left camera. Throws std::domain_error when
/// the disparity is at or below minDisparity.
template <typename S>
Vec3<S> triangulateStereoPoint(S uL, S vL, S uR, const CameraModel<S>& cam,
                               S minDisparity = S(kDefaultMinDisparity)) {
  const S disparity = uL - uR;
  if (disparity <= minDisparity) {
    throw std::domain_error("triangulateStereoPoint: degenerate disparity");
  }
  const S z = cam.fx * cam.baseline / disparity;
  return Vec3<S>((uL - cam.cx) * z / cam.fx, (vL - cam.cy) * z / cam.fy, z);
}

}  // namespace plvo
