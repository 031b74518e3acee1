#include "plvo/dynamic_grid.hpp"

#include <algorithm>

namespace plvo {

namespace {

std::optional<Vec2d> predictPixel(const Vec3d& P, const Posed& T_pred,
                                  const CameraModeld& cam, double zMin) {
  const Vec3d Pc = T_pred * P;
  if (Pc.z() <= zMin) return std::nullopt;
  return Vec2d(cam.fx * Pc.x() / Pc.z() + cam.cx,
               cam.fy * Pc.y() / Pc.z() + cam.cy);
}

}  // namespace

std::optional<double> predictionErrorPoint(const Vec3d& prevLandmark,
                                           const Vec2d& currObs,
                                           const Posed& T_pred,
                                           const CameraModeld& cam,
                                           double zMin) {
  const auto px = predictPixel(prevLandmark, T_pred, cam, zMin);
  if (!px) return std::nullopt;
  return (currObs - *px).squaredNorm();
}

std::optional<double> predictionErrorLine(const Vec3d& prevMidpoint3D,
                                          const Vec2d& currObsMidpoint,
                                          const Posed& T_pred,
                                          const CameraModeld& cam,
                                          double zMin) {
  const auto px = predictPixel(prevMidpoint3D, T_pred, cam, zMin);
  if (!px) return std::nullopt;
  return (currObsMidpoint - *px).squaredNorm();
}

DynamicMask markDynamic(const StereoFrame& prev, const StereoFrame& curr,
                        const Correspondences& corrs, const Posed& T_pred,
                        const CameraModeld& cam,
                        const DynamicGridConfig& cfg) {
  DynamicMask mask;
  mask.flagged.assign(GridIndex::kCols * GridIndex::kRows, 0);

  // Per-cell sums over tracked points; only points score cells, lines are
  // classified afterwards through their midpoints.
  std::vector<double> errSum(GridIndex::kCols * GridIndex::kRows, 0.0);
  std::vector<int> errCount(GridIndex::kCols * GridIndex::kRows, 0);
  for (const TrackPair& tp : corrs.points) {
    const auto& obs = curr.points[tp.curr];
    const auto cell = curr.grid.cellOf(Vec2d(obs.uL, obs.vL));
    if (!cell) continue;
    const auto err = predictionErrorPoint(prev.pointLandmarks[tp.prev],
                                          Vec2d(obs.uL, obs.vL), T_pred, cam);
    if (!err) continue;  // behind camera: excluded from cell statistics
    const int flat = GridIndex::flatten(*cell);
    errSum[flat] += *err;
    errCount[flat] += 1;
  }

  for (int b = 0; b < GridIndex::kRows; ++b) {
    for (int a = 0; a < GridIndex::kCols; ++a) {
      const int flat = GridIndex::flatten({a, b});
      if (errCount[flat] == 0) continue;  // empty cell: no score
      if (errSum[flat] / errCount[flat] <= cfg.rho) continue;
      mask.seedCells.push_back({a, b});
      for (int db = -1; db <= 1; ++db) {
        for (int da = -1; da <= 1; ++da) {
          const int na = a + da, nb = b + db;
          if (na < 0 || na >= GridIndex::kCols || nb < 0 ||
              nb >= GridIndex::kRows)
            continue;
          mask.flagged[GridIndex::flatten({na, nb})] = 1;
        }
      }
    }
  }
  for (int b = 0; b < GridIndex::kRows; ++b) {
    for (int a = 0; a < GridIndex::kCols; ++a) {
      if (mask.flagged[GridIndex::flatten({a, b})]) {
        mask.flaggedCells.push_back({a, b});
      }
    }
  }

  for (int j = 0; j < static_cast<int>(curr.points.size()); ++j) {
    const auto cell =
        curr.grid.cellOf(Vec2d(curr.points[j].uL, curr.points[j].vL));
    if (cell && mask.isFlagged(*cell)) mask.dynamicPointIdx.push_back(j);
  }
  for (int j = 0; j < static_cast<int>(curr.lines.size()); ++j) {
    const auto cell = curr.grid.cellOf(curr.lines[j].midpointL());
    if (cell && mask.isFlagged(*cell)) mask.dynamicLineIdx.push_back(j);
  }
  return mask;
}

Correspondences filterDynamic(const StereoFrame& curr,
                              const Correspondences& corrs,
                              const DynamicMask& mask) {
  Correspondences out;
  for (const TrackPair& tp : corrs.points) {
    const auto cell =
        curr.grid.cellOf(Vec2d(curr.points[tp.curr].uL,
                               curr.points[tp.curr].vL));
    if (cell && mask.isFlagged(*cell)) continue;
    out.points.push_back(tp);
  }
  for (const TrackPair& tp : corrs.lines) {
    const auto cell = curr.grid.cellOf(curr.lines[tp.curr].midpointL());
    if (cell && mask.isFlagged(*cell)) continue;
    out.lines.push_back(tp);
  }
  return out;
}

}  // namespace plvo
