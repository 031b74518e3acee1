#pragma once

#include <vector>

#include "plvo/frame_grid.hpp"
#include "plvo/lie.hpp"
#include "plvo/types.hpp"

namespace plvo {

enum class ResidualKind { Point, LinePerp, LinePara };

/// One weighted least-squares term: residual, its Jacobian with respect to
/// a left-multiplied pose perturbation (translation columns 0-2, rotation
/// columns 3-5), and the information matrix.
struct ResidualBlock {
  ResidualKind kind = ResidualKind::Point;
  int featureIndex = -1;  // current-frame observation index, per kind
  Vec2d r = Vec2d::Zero();
  Mat26d J = Mat26d::Zero();
  Mat2d W = Mat2d::Identity();
};

/// Observed-minus-projected pixel residual of a tracked point.
Vec2d pointResidual(const Vec3d& prevLandmark, const Vec2d& obs,
                    const Posed& T, const CameraModeld& cam,
                    double zMin = kDefaultZMin);
Vec2d pointResidual(const Vec3d& prevLandmark, const Vec2d& obs,
                    const Twistd& xi, const CameraModeld& cam,
                    double zMin = kDefaultZMin);

/// Closed-form point Jacobian evaluated at the transformed point P'
/// (camera frame). Carries the leading minus of the observed-minus-
/// projected residual convention.
Mat26d pointJacobian(const Vec3d& Pprime, const CameraModeld& cam);
Mat26d pointJacobian(const Vec3d& prevLandmark, const Twistd& xi,
                     const CameraModeld& cam);

/// Signed distances (d_s, d_e) of the observed segment endpoints to the
/// projected infinite line of the transformed previous-frame line.
Vec2d linePerpResidual(const PluckerLined& prevLine, const Vec2d& obsStart,
                       const Vec2d& obsEnd, const Posed& T,
                       const CameraModeld& cam);
Vec2d linePerpResidual(const PluckerLined& prevLine, const Vec2d& obsStart,
                       const Vec2d& obsEnd, const Twistd& xi,
                       const CameraModeld& cam);

/// Stacked 2x6 Jacobian of (d_s, d_e), each row anchored at the transformed
/// 3D endpoint it corresponds to: (1/l) [l1 l2] J_point(anchor). This is
/// the exact derivative when the observed endpoint sits perpendicular off
/// the projected anchor, which is how line observations deviate from the
/// supporting line.
Mat26d linePerpJacobian(const PluckerLined& prevLine,
                        const LineSegment3Dd& prevSegment, const Posed& T,
                        const CameraModeld& cam);

/// Residual-weighted combination d_s * dd_s/dxi + d_e * dd_e/dxi: the
/// gradient of (d_s^2 + d_e^2)/2.
Eigen::Matrix<double, 1, 6> linePerpCombinedGradient(
    const PluckerLined& prevLine, const LineSegment3Dd& prevSegment,
    const Vec2d& obsStart, const Vec2d& obsEnd, const Posed& T,
    const CameraModeld& cam);

/// Midpoint residual parallel to the line: the point residual evaluated at
/// the previous segment's 3D midpoint against the observed 2D midpoint.
Vec2d lineParaResidual(const LineSegment3Dd& prevSegment,
                       const Vec2d& obsMidpoint, const Posed& T,
                       const CameraModeld& cam, double zMin = kDefaultZMin);
Vec2d lineParaResidual(const LineSegment3Dd& prevSegment,
                       const Vec2d& obsMidpoint, const Twistd& xi,
                       const CameraModeld& cam, double zMin = kDefaultZMin);

Mat26d lineParaJacobian(const LineSegment3Dd& prevSegment, const Posed& T,
                        const CameraModeld& cam);

enum class CostMode { PointsOnly, PerpOnlyLines, ParaOnlyLines, BothLines };

struct ResidualWeights {
  bool robust = false;        // pseudo-Huber reweighting, off by default
  double robustDelta = 1.5;   // px
};

struct AssemblyCounts {
  int pointBlocks = 0;
  int perpBlocks = 0;
  int paraBlocks = 0;
  int behindCamera = 0;
  int degenerateLines = 0;

  int rows() const { return 2 * (pointBlocks + perpBlocks + paraBlocks); }
};

/// Builds one block per surviving correspondence per active term, in
/// canonical order (kind, then feature index) so accumulation is
/// reproducible regardless of input ordering.
std::vector<ResidualBlock> assembleBlocks(const StereoFrame& prev,
                                          const StereoFrame& curr,
                                          const Correspondences& corrs,
                                          const Posed& T,
                                          const CameraModeld& cam,
                                          const ResidualWeights& weights,
                                          CostMode mode,
                                          AssemblyCounts* counts = nullptr,
                                          double zMin = kDefaultZMin);

}  // namespace plvo
