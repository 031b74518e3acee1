#include "plvo/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Geometry>

#include "plvo/lie.hpp"

namespace plvo {

namespace {

constexpr double kRadToDeg = 180.0 / EIGEN_PI;

void checkMatchingIds(const Trajectory& gt, const Trajectory& est) {
  std::string missing;
  std::size_t j = 0;
  for (const auto& g : gt) {
    while (j < est.size() && est[j].frameId < g.frameId) ++j;
    if (j >= est.size() || est[j].frameId != g.frameId) {
      missing += " " + std::to_string(g.frameId);
    }
  }
  if (gt.size() != est.size() || !missing.empty()) {
    throw std::runtime_error(
        "trajectory frame ids do not match; missing from estimate:" +
        (missing.empty() ? std::string(" (extra frames present)") : missing));
  }
}

Posed umeyamaAlign(const Trajectory& gt, const Trajectory& est) {
  Eigen::Matrix3Xd src(3, est.size()), dst(3, gt.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    src.col(i) = est[i].pose.t;
    dst.col(i) = gt[i].pose.t;
  }
  const Eigen::Matrix4d S = Eigen::umeyama(src, dst, /*with_scaling=*/false);
  return Posed(S.topLeftCorner<3, 3>(), S.topRightCorner<3, 1>());
}

}  // namespace

ErrorStats ape(const Trajectory& gt, const Trajectory& est, bool align) {
  checkMatchingIds(gt, est);
  if (gt.empty()) return {};

  const Posed S = align ? umeyamaAlign(gt, est) : Posed::Identity();
  double transSq = 0.0, rotSq = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const Posed E = gt[i].pose.inverse() * (S * est[i].pose);
    transSq += E.t.squaredNorm();
    const double angleDeg = rotationAngle(E.R) * kRadToDeg;
    rotSq += angleDeg * angleDeg;
  }
  return {std::sqrt(transSq / gt.size()), std::sqrt(rotSq / gt.size())};
}

ErrorStats rpe(const Trajectory& gt, const Trajectory& est, int delta) {
  if (delta <= 0) throw std::invalid_argument("rpe: delta must be positive");
  checkMatchingIds(gt, est);
  if (static_cast<int>(gt.size()) <= delta) {
    throw std::invalid_argument("rpe: trajectory shorter than delta");
  }

  double transSq = 0.0, rotSq = 0.0;
  const std::size_t n = gt.size() - delta;
  for (std::size_t i = 0; i < n; ++i) {
    const Posed gtRel = gt[i].pose.inverse() * gt[i + delta].pose;
    const Posed estRel = est[i].pose.inverse() * est[i + delta].pose;
    const Posed E = gtRel.inverse() * estRel;
    transSq += E.t.squaredNorm();
    const double angleDeg = rotationAngle(E.R) * kRadToDeg;
    rotSq += angleDeg * angleDeg;
  }
  return {std::sqrt(transSq / n), std::sqrt(rotSq / n)};
}

}  // namespace plvo
