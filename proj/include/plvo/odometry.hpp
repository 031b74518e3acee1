#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plvo/dynamic_grid.hpp"
#include "plvo/frame_grid.hpp"
#include "plvo/residuals.hpp"
#include "plvo/solver.hpp"
#include "plvo/types.hpp"

namespace plvo {

/// Constant-velocity model: the next inter-frame motion is predicted to be
/// the previous solved one. Invalid until two frames are processed.
struct MotionModel {
  Posed T_p2p;  // last solved prev->curr transform
  bool valid = false;
};

struct OdometryConfig {
  MatchConfig match;
  DynamicGridConfig dynamicGrid;
  SolverConfig solver;
  ResidualWeights weights;
  CostMode mode = CostMode::BothLines;
  int minRowsForSolve = 8;  // below this, coast on the motion model
};

/// Per-frame pipeline outcome and exclusion counters.
struct FrameStats {
  std::int64_t frameId = 0;
  int pointsMatched = 0, linesMatched = 0;    // stereo
  int pointsTracked = 0, linesTracked = 0;    // temporal, post-filter
  int dynamicRemoved = 0;
  int outOfBounds = 0;        // raw observations outside the image
  int behindCamera = 0;       // residual blocks excluded by depth
  int degenerateLines = 0;    // optical-center projections + bad endpoints
  int solverIterations = 0;
  double finalCost = 0.0;
  bool coasted = false;       // fell back to the motion-model prediction
  bool solved = false;
  SolveReport report;
  std::vector<GridCell> maskCells;  // flagged dynamic cells this frame
};

/// `frame_id n_pts n_lines n_dyn_removed iters cost` regression line.
std::string diagnosticsLine(const FrameStats& stats);

/// Frame-to-frame stereo odometry: stereo match and triangulate each frame,
/// track against the previous frame under the constant-velocity prediction,
/// drop features in dynamic grid cells, and solve for the inter-frame
/// motion. The trajectory stores camera-to-world poses with the first
/// camera as the world origin.
class OdometryEngine {
 public:
  OdometryEngine(const CameraModeld& cam, const OdometryConfig& cfg)
      : cam_(cam), cfg_(cfg) {}

  const FrameStats& processFrame(const RawFrame& raw);

  const std::vector<Posed>& trajectory() const { return trajectory_; }
  const std::vector<std::int64_t>& frameIds() const { return frameIds_; }
  const std::vector<FrameStats>& stats() const { return stats_; }
  const MotionModel& motionModel() const { return model_; }
  const CameraModeld& camera() const { return cam_; }

  /// Motion-model prediction for the next inter-frame transform.
  Posed predict() const { return model_.valid ? model_.T_p2p : Posed(); }

 private:
  CameraModeld cam_;
  OdometryConfig cfg_;
  MotionModel model_;
  StereoFrame prevFrame_;
  bool hasPrev_ = false;
  std::vector<Posed> trajectory_;
  std::vector<std::int64_t> frameIds_;
  std::vector<FrameStats> stats_;
};

}  // namespace plvo
