#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "plvo/observations.hpp"
#include "plvo/types.hpp"

namespace plvo {

struct GridCell {
  int a = 0;  // column, 0..63
  int b = 0;  // row, 0..47

  friend bool operator==(const GridCell&, const GridCell&) = default;
  friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

/// Fixed 64x48 partition of the image. Points live in exactly one cell;
/// a segment is registered in every cell it passes through.
struct GridIndex {
  static constexpr int kCols = 64;
  static constexpr int kRows = 48;

  int width = 0, height = 0;
  std::vector<std::vector<int>> pointBuckets;     // kept point indices
  std::vector<std::vector<int>> lineBuckets;      // traversed-cell registration
  std::vector<std::vector<int>> lineMidBuckets;   // by left-image 2D midpoint

  GridIndex() = default;
  GridIndex(int w, int h)
      : width(w),
        height(h),
        pointBuckets(kCols * kRows),
        lineBuckets(kCols * kRows),
        lineMidBuckets(kCols * kRows) {}

  std::optional<GridCell> cellOf(const Vec2d& px) const {
    if (px.x() < 0 || px.y() < 0 || px.x() >= width || px.y() >= height) {
      return std::nullopt;
    }
    return GridCell{static_cast<int>(px.x() * kCols / width),
                    static_cast<int>(px.y() * kRows / height)};
  }

  static int flatten(const GridCell& c) { return c.b * kCols + c.a; }

  const std::vector<int>& pointsIn(const GridCell& c) const {
    return pointBuckets[flatten(c)];
  }
  const std::vector<int>& linesThrough(const GridCell& c) const {
    return lineBuckets[flatten(c)];
  }
  const std::vector<int>& lineMidpointsIn(const GridCell& c) const {
    return lineMidBuckets[flatten(c)];
  }
};

/// All cells a segment from p0 to p1 intersects, in traversal order.
std::vector<GridCell> traverseCells(const GridIndex& grid, const Vec2d& p0,
                                    const Vec2d& p1);

struct MatchConfig {
  double epipolarTol = 2.0;       // |vL - vR| bound, px
  double minDisparity = kDefaultMinDisparity;
  double maxDisparityFrac = 0.3;  // of image width; fixes the cell range
  double searchRadiusPx = 25.0;   // temporal search radius
  int maxPointsPerCell = 8;
  double zMin = kDefaultZMin;

  /// Horizontal stereo search width in cells.
  int horizontalSearchCells(int imageWidth) const;
};

/// Matched stereo frame: observations and their triangulated landmarks are
/// kept in lock step (points[i] <-> pointLandmarks[i], same for lines).
struct StereoFrame {
  std::int64_t frameId = 0;
  std::vector<PointObservation> points;
  std::vector<LineObservation> lines;
  std::vector<Vec3d> pointLandmarks;           // left-camera frame
  std::vector<LineSegment3Dd> lineSegments;    // left-camera frame
  std::vector<PluckerLined> lineLandmarks;     // normalized, ||d|| = 1
  GridIndex grid;

  struct IngestCounts {
    int outOfBoundsPoints = 0;
    int outOfBoundsLines = 0;
    int degenerateLines = 0;  // line matches lost to endpoint triangulation
  } counts;
};

/// Index pair into the raw left/right feature arrays.
struct MatchPair {
  int left = 0;
  int right = 0;
};

/// Index pair linking a previous-frame landmark to a current observation.
struct TrackPair {
  int prev = 0;
  int curr = 0;
};

struct Correspondences {
  std::vector<TrackPair> points;
  std::vector<TrackPair> lines;
};

/// Buckets features into the 64x48 grid, keeping at most
/// cfg.maxPointsPerCell points per cell by descending response (ties by
/// smaller index). Out-of-bounds features are dropped and counted.
GridIndex buildGridIndex(const std::vector<RawPoint>& points,
                         const std::vector<RawLine>& lines, int width,
                         int height, const MatchConfig& cfg,
                         int* outOfBoundsPoints = nullptr,
                         int* outOfBoundsLines = nullptr);

/// Left-right point matching: for a left point in cell (a, b) the
/// candidates are right points in cells (a-c .. a, b) passing the epipolar
/// and disparity rules; the winner is the smallest descriptor distance and
/// only mutually-best pairs survive. `visited` (optional) records every
/// cell inspected, for instrumented tests.
std::vector<MatchPair> stereoMatchPoints(const std::vector<RawPoint>& left,
                                         const GridIndex& leftGrid,
                                         const std::vector<RawPoint>& right,
                                         const GridIndex& rightGrid,
                                         const MatchConfig& cfg,
                                         std::vector<GridCell>* visited =
                                             nullptr);

/// Same rule applied endpoint-wise: a right line is a candidate only if
/// both its endpoints fall in the grid ranges of the corresponding left
/// endpoints and each endpoint passes the epipolar/disparity checks.
std::vector<MatchPair> stereoMatchLines(const std::vector<RawLine>& left,
                                        const GridIndex& leftGrid,
                                        const std::vector<RawLine>& right,
                                        const GridIndex& rightGrid,
                                        const MatchConfig& cfg,
                                        std::vector<GridCell>* visited =
                                            nullptr);

/// Stereo-matches and triangulates a raw frame into a StereoFrame.
StereoFrame makeStereoFrame(const RawFrame& raw, const CameraModeld& cam,
                            const MatchConfig& cfg);

/// Tracks previous-frame landmarks into the current frame: each landmark is
/// projected under T_pred, the search covers the projected cell plus its 8
/// neighbors within cfg.searchRadiusPx, and mutually-best descriptor
/// matches win. Lines are tracked through their projected 3D midpoints
/// against observed 2D midpoints.
Correspondences trackTemporal(const StereoFrame& prev,
                              const StereoFrame& curr, const Posed& T_pred,
                              const CameraModeld& cam, const MatchConfig& cfg,
                              std::vector<GridCell>* visited = nullptr);

}  // namespace plvo
