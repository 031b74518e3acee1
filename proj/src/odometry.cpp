#include "plvo/odometry.hpp"

#include <cmath>
#include <cstdio>

#include "plvo/lie.hpp"

namespace plvo {

std::string diagnosticsLine(const FrameStats& stats) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%lld %d %d %d %d %.17g",
                static_cast<long long>(stats.frameId), stats.pointsTracked,
                stats.linesTracked, stats.dynamicRemoved,
                stats.solverIterations, stats.finalCost);
  return buf;
}

const FrameStats& OdometryEngine::processFrame(const RawFrame& raw) {
  FrameStats stats;
  stats.frameId = raw.frameId;

  StereoFrame frame = makeStereoFrame(raw, cam_, cfg_.match);
  stats.pointsMatched = static_cast<int>(frame.points.size());
  stats.linesMatched = static_cast<int>(frame.lines.size());
  stats.outOfBounds =
      frame.counts.outOfBoundsPoints + frame.counts.outOfBoundsLines;
  stats.degenerateLines = frame.counts.degenerateLines;

  if (!hasPrev_) {
    trajectory_.push_back(Posed::Identity());
    frameIds_.push_back(raw.frameId);
    prevFrame_ = std::move(frame);
    hasPrev_ = true;
    stats_.push_back(stats);
    return stats_.back();
  }

  const Posed T_pred = predict();
  Correspondences corrs =
      trackTemporal(prevFrame_, frame, T_pred, cam_, cfg_.match);

  if (model_.valid && cfg_.dynamicGrid.enabled) {
    const DynamicMask mask =
        markDynamic(prevFrame_, frame, corrs, T_pred, cam_, cfg_.dynamicGrid);
    stats.maskCells = mask.flaggedCells;
    if (!mask.empty()) {
      const Correspondences kept = filterDynamic(frame, corrs, mask);
      stats.dynamicRemoved =
          static_cast<int>(corrs.points.size() - kept.points.size() +
                           corrs.lines.size() - kept.lines.size());
      corrs = kept;
    }
  }
  stats.pointsTracked = static_cast<int>(corrs.points.size());
  stats.linesTracked = static_cast<int>(corrs.lines.size());

  // The solve starts at the motion-model prediction; any failure below
  // falls back to it (coast).
  Posed T_p2c = T_pred;
  AssemblyCounts counts;
  const auto builder = [&](const Posed& T) {
    return assembleBlocks(prevFrame_, frame, corrs, T, cam_, cfg_.weights,
                          cfg_.mode, &counts);
  };
  const std::vector<ResidualBlock> initialBlocks = builder(T_pred);
  stats.behindCamera = counts.behindCamera;
  stats.degenerateLines += counts.degenerateLines;

  if (counts.rows() >= cfg_.minRowsForSolve) {
    SolveReport report;
    try {
      report = solve(builder, se3Log(T_pred), cfg_.solver);
    } catch (const std::domain_error&) {
      report.converged = false;  // log near pi: treat as solver failure
    }
    stats.report = report;
    stats.solverIterations = report.iterations;
    stats.finalCost = report.finalCost;
    const bool usable = report.converged && report.pose.t.allFinite() &&
                        report.pose.R.allFinite();
    if (usable) {
      T_p2c = report.pose;
      stats.solved = true;
    } else {
      stats.coasted = true;
    }
  } else {
    stats.coasted = true;
    stats.finalCost = totalCost(initialBlocks);
  }

  model_.T_p2p = T_p2c;
  model_.valid = true;
  trajectory_.push_back(trajectory_.back() * T_p2c.inverse());
  frameIds_.push_back(raw.frameId);
  prevFrame_ = std::move(frame);
  stats_.push_back(stats);
  return stats_.back();
}

}  // namespace plvo
