#pragma once

#include "plvo/io.hpp"
#include "plvo/types.hpp"

namespace plvo {

struct ErrorStats {
  double transRmse = 0.0;   // meters
  double rotRmseDeg = 0.0;  // degrees
};

/// Absolute pose error: per-frame error pose E_i = gt_i^-1 est_i, RMSE of
/// translation norms (m) and rotation angles (deg). With align set, the
/// estimate is first registered onto the ground truth by a rigid (no
/// scale) fit of the positions. Throws std::runtime_error listing missing
/// frame ids when the trajectories do not cover the same frames.
ErrorStats ape(const Trajectory& gt, const Trajectory& est,
               bool align = false);

/// Relative pose error over every index pair (i, i+delta):
/// E = (gt_i^-1 gt_{i+delta})^-1 (est_i^-1 est_{i+delta}).
/// Throws std::invalid_argument when delta <= 0 or the trajectories are too
/// short.
ErrorStats rpe(const Trajectory& gt, const Trajectory& est, int delta = 1);

}  // namespace plvo
