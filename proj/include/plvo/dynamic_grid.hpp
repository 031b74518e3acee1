#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "plvo/frame_grid.hpp"
#include "plvo/types.hpp"

namespace plvo {

struct DynamicGridConfig {
  double rho = 4.0;  // threshold on per-cell mean squared pixel error, px^2
  bool enabled = true;
};

/// Cells flagged as dynamic plus the features removed with them. The
/// flagged set is the 3x3 dilation (clamped at the image border) of every
/// seed cell whose mean squared prediction error exceeds rho.
struct DynamicMask {
  std::vector<GridCell> seedCells;     // sorted
  std::vector<GridCell> flaggedCells;  // sorted, dilated
  std::vector<std::uint8_t> flagged;   // kCols*kRows lookup
  std::vector<int> dynamicPointIdx;    // indices into frame.points
  std::vector<int> dynamicLineIdx;     // indices into frame.lines

  bool isFlagged(const GridCell& c) const {
    return !flagged.empty() && flagged[GridIndex::flatten(c)] != 0;
  }
  bool empty() const { return flaggedCells.empty(); }
};

/// Squared pixel distance between the current observation and the
/// projection of the previous-frame landmark under the motion-model
/// prediction. Empty when the predicted point falls behind the camera.
std::optional<double> predictionErrorPoint(const Vec3d& prevLandmark,
                                           const Vec2d& currObs,
                                           const Posed& T_pred,
                                           const CameraModeld& cam,
                                           double zMin = kDefaultZMin);

/// Same measure for a line, taken between the observed 2D midpoint and the
/// projected previous-frame 3D midpoint.
std::optional<double> predictionErrorLine(const Vec3d& prevMidpoint3D,
                                          const Vec2d& currObsMidpoint,
                                          const Posed& T_pred,
                                          const CameraModeld& cam,
                                          double zMin = kDefaultZMin);

/// Scores each grid cell by the mean squared prediction error of its
/// tracked points, seeds the mask with cells above rho, dilates 3x3, and
/// lists every current point in a flagged cell plus every line whose
/// observed midpoint lies in one.
DynamicMask markDynamic(const StereoFrame& prev, const StereoFrame& curr,
                        const Correspondences& corrs, const Posed& T_pred,
                        const CameraModeld& cam, const DynamicGridConfig& cfg);

/// Drops correspondences whose current observation (point pixel, or line
/// midpoint) falls in a flagged cell; everything else passes unchanged.
Correspondences filterDynamic(const StereoFrame& curr,
                              const Correspondences& corrs,
                              const DynamicMask& mask);

}  // namespace plvo
