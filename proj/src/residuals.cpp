#include "plvo/residuals.hpp"

#include <algorithm>
#include <cmath>

#include "plvo/camera.hpp"
#include "plvo/plucker.hpp"

namespace plvo {

Vec2d pointResidual(const Vec3d& prevLandmark, const Vec2d& obs,
                    const Posed& T, const CameraModeld& cam, double zMin) {
  return obs - projectPoint(T * prevLandmark, cam, zMin);
}

Vec2d pointResidual(const Vec3d& prevLandmark, const Vec2d& obs,
                    const Twistd& xi, const CameraModeld& cam, double zMin) {
  return pointResidual(prevLandmark, obs, se3Exp(xi), cam, zMin);
}

Mat26d pointJacobian(const Vec3d& Pprime, const CameraModeld& cam) {
  const double X = Pprime.x(), Y = Pprime.y(), Z = Pprime.z();
  const double iz = 1.0 / Z, iz2 = iz * iz;
  Mat26d J;
  // clang-format off
  J << cam.fx * iz, 0.0,         -cam.fx * X * iz2,
       -cam.fx * X * Y * iz2,     cam.fx + cam.fx * X * X * iz2,
       -cam.fx * Y * iz,
       0.0,         cam.fy * iz, -cam.fy * Y * iz2,
       -cam.fy - cam.fy * Y * Y * iz2,  cam.fy * X * Y * iz2,
        cam.fy * X * iz;
  // clang-format on
  return -J;
}

Mat26d pointJacobian(const Vec3d& prevLandmark, const Twistd& xi,
                     const CameraModeld& cam) {
  return pointJacobian(se3Exp(xi) * prevLandmark, cam);
}

Vec2d linePerpResidual(const PluckerLined& prevLine, const Vec2d& obsStart,
                       const Vec2d& obsEnd, const Posed& T,
                       const CameraModeld& cam) {
  const Vec3d l = projectLine(transformLine(prevLine, T), cam);
  return Vec2d(pointLineDistance(obsStart, l), pointLineDistance(obsEnd, l));
}

Vec2d linePerpResidual(const PluckerLined& prevLine, const Vec2d& obsStart,
                       const Vec2d& obsEnd, const Twistd& xi,
                       const CameraModeld& cam) {
  return linePerpResidual(prevLine, obsStart, obsEnd, se3Exp(xi), cam);
}

Mat26d linePerpJacobian(const PluckerLined& prevLine,
                        const LineSegment3Dd& prevSegment, const Posed& T,
                        const CameraModeld& cam) {
  const Vec3d l = projectLine(transformLine(prevLine, T), cam);
  const double norm = l.head<2>().norm();
  const Eigen::Matrix<double, 1, 2> l12 = l.head<2>().transpose() / norm;
  Mat26d J;
  J.row(0) = l12 * pointJacobian(T * prevSegment.start, cam);
  J.row(1) = l12 * pointJacobian(T * prevSegment.end, cam);
  return J;
}

Eigen::Matrix<double, 1, 6> linePerpCombinedGradient(
    const PluckerLined& prevLine, const LineSegment3Dd& prevSegment,
    const Vec2d& obsStart, const Vec2d& obsEnd, const Posed& T,
    const CameraModeld& cam) {
  const Vec2d d = linePerpResidual(prevLine, obsStart, obsEnd, T, cam);
  const Mat26d J = linePerpJacobian(prevLine, prevSegment, T, cam);
  return d.x() * J.row(0) + d.y() * J.row(1);
}

Vec2d lineParaResidual(const LineSegment3Dd& prevSegment,
                       const Vec2d& obsMidpoint, const Posed& T,
                       const CameraModeld& cam, double zMin) {
  return pointResidual(prevSegment.midpoint(), obsMidpoint, T, cam, zMin);
}

Vec2d lineParaResidual(const LineSegment3Dd& prevSegment,
                       const Vec2d& obsMidpoint, const Twistd& xi,
                       const CameraModeld& cam, double zMin) {
  return lineParaResidual(prevSegment, obsMidpoint, se3Exp(xi), cam, zMin);
}

Mat26d lineParaJacobian(const LineSegment3Dd& prevSegment, const Posed& T,
                        const CameraModeld& cam) {
  return pointJacobian(T * prevSegment.midpoint(), cam);
}

namespace {

Mat2d informationMatrix(const Vec2d& r, const ResidualWeights& weights) {
  if (!weights.robust) return Mat2d::Identity();
  const double s = r.norm() / weights.robustDelta;
  return Mat2d::Identity() / std::sqrt(1.0 + s * s);
}

}  // namespace

std::vector<ResidualBlock> assembleBlocks(const StereoFrame& prev,
                                          const StereoFrame& curr,
                                          const Correspondences& corrs,
                                          const Posed& T,
                                          const CameraModeld& cam,
                                          const ResidualWeights& weights,
                                          CostMode mode,
                                          AssemblyCounts* counts,
                                          double zMin) {
  AssemblyCounts local;
  std::vector<ResidualBlock> blocks;
  const bool usePerp =
      mode == CostMode::PerpOnlyLines || mode == CostMode::BothLines;
  const bool usePara =
      mode == CostMode::ParaOnlyLines || mode == CostMode::BothLines;

  for (const TrackPair& tp : corrs.points) {
    const Vec3d Pc = T * prev.pointLandmarks[tp.prev];
    if (Pc.z() <= zMin) {
      ++local.behindCamera;
      continue;
    }
    ResidualBlock b;
    b.kind = ResidualKind::Point;
    b.featureIndex = tp.curr;
    b.r = Vec2d(curr.points[tp.curr].uL, curr.points[tp.curr].vL) -
          projectPoint(Pc, cam, zMin);
    b.J = pointJacobian(Pc, cam);
    b.W = informationMatrix(b.r, weights);
    blocks.push_back(b);
    ++local.pointBlocks;
  }

  for (const TrackPair& tp : corrs.lines) {
    const LineSegment3Dd& seg = prev.lineSegments[tp.prev];
    const LineObservation& obs = curr.lines[tp.curr];
    if (usePerp) {
      const Vec3d l = projectLine(transformLine(prev.lineLandmarks[tp.prev],
                                                T),
                                  cam);
      const Vec3d As = T * seg.start;
      const Vec3d Ae = T * seg.end;
      if (lineProjectionDegenerate(l)) {
        ++local.degenerateLines;
      } else if (As.z() <= zMin || Ae.z() <= zMin) {
        ++local.behindCamera;
      } else {
        ResidualBlock b;
        b.kind = ResidualKind::LinePerp;
        b.featureIndex = tp.curr;
        b.r = Vec2d(pointLineDistance(obs.startL, l),
                    pointLineDistance(obs.endL, l));
        const Eigen::Matrix<double, 1, 2> l12 =
            l.head<2>().transpose() / l.head<2>().norm();
        b.J.row(0) = l12 * pointJacobian(As, cam);
        b.J.row(1) = l12 * pointJacobian(Ae, cam);
        b.W = informationMatrix(b.r, weights);
        blocks.push_back(b);
        ++local.perpBlocks;
      }
    }
    if (usePara) {
      const Vec3d Mc = T * seg.midpoint();
      if (Mc.z() <= zMin) {
        ++local.behindCamera;
        continue;
      }
      ResidualBlock b;
      b.kind = ResidualKind::LinePara;
      b.featureIndex = tp.curr;
      b.r = obs.midpointL() - projectPoint(Mc, cam, zMin);
      b.J = pointJacobian(Mc, cam);
      b.W = informationMatrix(b.r, weights);
      blocks.push_back(b);
      ++local.paraBlocks;
    }
  }

  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const ResidualBlock& x, const ResidualBlock& y) {
                     if (x.kind != y.kind) return x.kind < y.kind;
                     return x.featureIndex < y.featureIndex;
                   });
  if (counts) *counts = local;
  return blocks;
}

}  // namespace plvo
