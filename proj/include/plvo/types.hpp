#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>

namespace plvo {

template <typename S> using Vec2 = Eigen::Matrix<S, 2, 1>;
template <typename S> using Vec3 = Eigen::Matrix<S, 3, 1>;
template <typename S> using Vec4 = Eigen::Matrix<S, 4, 1>;
template <typename S> using Vec6 = Eigen::Matrix<S, 6, 1>;
template <typename S> using Mat2 = Eigen::Matrix<S, 2, 2>;
template <typename S> using Mat3 = Eigen::Matrix<S, 3, 3>;
template <typename S> using Mat4 = Eigen::Matrix<S, 4, 4>;
template <typename S> using Mat26 = Eigen::Matrix<S, 2, 6>;
template <typename S> using Mat66 = Eigen::Matrix<S, 6, 6>;

using Vec2d = Vec2<double>;
using Vec3d = Vec3<double>;
using Vec4d = Vec4<double>;
using Vec6d = Vec6<double>;
using Mat2d = Mat2<double>;
using Mat3d = Mat3<double>;
using Mat4d = Mat4<double>;
using Mat26d = Mat26<double>;
using Mat66d = Mat66<double>;

/// Tangent-space parameterization of a rigid motion, ordered [v; w]:
/// translational part first, rotational part last.
template <typename S> using Twist = Vec6<S>;
using Twistd = Twist<double>;

inline constexpr double kDefaultZMin = 1e-6;          // meters
inline constexpr double kDefaultMinDisparity = 0.5;   // pixels
inline constexpr double kDefaultLineProjEps = 1e-12;  // pixel-line scale

/// Rigid transform mapping points of one frame into another: p' = R p + t.
template <typename S>
struct Pose {
  Mat3<S> R = Mat3<S>::Identity();
  Vec3<S> t = Vec3<S>::Zero();

  Pose() = default;
  Pose(const Mat3<S>& rotation, const Vec3<S>& translation)
      : R(rotation), t(translation) {}

  static Pose Identity() { return Pose{}; }

  Vec3<S> operator*(const Vec3<S>& p) const { return R * p + t; }

  Pose operator*(const Pose& rhs) const {
    return Pose(R * rhs.R, R * rhs.t + t);
  }

  Pose inverse() const {
    Mat3<S> Rt = R.transpose();
    return Pose(Rt, -(Rt * t));
  }

  Mat4<S> matrix() const {
    Mat4<S> T = Mat4<S>::Identity();
    T.template topLeftCorner<3, 3>() = R;
    T.template topRightCorner<3, 1>() = t;
    return T;
  }

  /// True when R is orthonormal with determinant +1 within tol.
  bool isRigid(S tol = S(1e-10)) const {
    return (R.transpose() * R - Mat3<S>::Identity()).cwiseAbs().maxCoeff() <=
               tol &&
           std::abs(R.determinant() - S(1)) <= tol;
  }
};

using Posed = Pose<double>;

/// Rectified pinhole stereo rig. Pixel coordinates are in [0, width) x
/// [0, height); the right camera sits at +baseline along the left camera's
/// x axis.
template <typename S>
struct CameraModel {
  S fx = S(0), fy = S(0);
  S cx = S(0), cy = S(0);
  S baseline = S(0);  // meters
  int width = 0, height = 0;

  bool valid() const {
    return fx > S(0) && fy > S(0) && baseline > S(0) && width > 0 &&
           height > 0;
  }

  bool inBounds(const Vec2<S>& px) const {
    return px.x() >= S(0) && px.x() < S(width) && px.y() >= S(0) &&
           px.y() < S(height);
  }
};

using CameraModeld = CameraModel<double>;

/// 3D line as a (normal, direction) pair: n is the normal of the plane
/// through the line and the origin, d the line direction, with n.d = 0.
template <typename S>
struct PluckerLine {
  Vec3<S> n = Vec3<S>::Zero();
  Vec3<S> d = Vec3<S>::Zero();

  PluckerLine() = default;
  PluckerLine(const Vec3<S>& normal, const Vec3<S>& direction)
      : n(normal), d(direction) {}

  /// Rescaled so that ||d|| = 1 (same homogeneous line, positive scale).
  PluckerLine normalized() const {
    S s = d.norm();
    return PluckerLine(n / s, d / s);
  }
};

using PluckerLined = PluckerLine<double>;

/// Finite 3D segment; the infinite supporting line is carried separately
/// as a PluckerLine where needed.
template <typename S>
struct LineSegment3D {
  Vec3<S> start = Vec3<S>::Zero();
  Vec3<S> end = Vec3<S>::Zero();

  LineSegment3D() = default;
  LineSegment3D(const Vec3<S>& s, const Vec3<S>& e) : start(s), end(e) {}

  Vec3<S> midpoint() const { return (start + end) / S(2); }
};

using LineSegment3Dd = LineSegment3D<double>;

}  // namespace plvo
