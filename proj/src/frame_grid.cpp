#include "plvo/frame_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plvo/camera.hpp"
#include "plvo/plucker.hpp"

namespace plvo {

int MatchConfig::horizontalSearchCells(int imageWidth) const {
  const double maxDisparityPx = maxDisparityFrac * imageWidth;
  return static_cast<int>(
      std::ceil(maxDisparityPx * GridIndex::kCols / imageWidth));
}

std::vector<GridCell> traverseCells(const GridIndex& grid, const Vec2d& p0,
                                    const Vec2d& p1) {
  // Work in grid coordinates and split [0,1] at every cell-boundary
  // crossing; the midpoint of each sub-interval identifies its cell.
  const double gx0 = p0.x() * GridIndex::kCols / grid.width;
  const double gy0 = p0.y() * GridIndex::kRows / grid.height;
  const double gx1 = p1.x() * GridIndex::kCols / grid.width;
  const double gy1 = p1.y() * GridIndex::kRows / grid.height;

  std::vector<double> ts{0.0, 1.0};
  auto addCrossings = [&ts](double a, double b) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (hi <= lo) return;
    for (int k = static_cast<int>(std::ceil(lo)); k <= hi; ++k) {
      const double t = (k - a) / (b - a);
      if (t > 0.0 && t < 1.0) ts.push_back(t);
    }
  };
  addCrossings(gx0, gx1);
  addCrossings(gy0, gy1);
  std::sort(ts.begin(), ts.end());

  std::vector<GridCell> cells;
  auto push = [&cells](int a, int b) {
    const GridCell c{std::clamp(a, 0, GridIndex::kCols - 1),
                     std::clamp(b, 0, GridIndex::kRows - 1)};
    if (std::find(cells.begin(), cells.end(), c) == cells.end())
      cells.push_back(c);
  };
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (ts[i + 1] - ts[i] <= 0.0) continue;
    const double t = (ts[i] + ts[i + 1]) / 2.0;
    push(static_cast<int>(gx0 + t * (gx1 - gx0)),
         static_cast<int>(gy0 + t * (gy1 - gy0)));
  }
  // Endpoint cells always register, covering zero-length segments too.
  push(static_cast<int>(gx0), static_cast<int>(gy0));
  push(static_cast<int>(gx1), static_cast<int>(gy1));
  return cells;
}

GridIndex buildGridIndex(const std::vector<RawPoint>& points,
                         const std::vector<RawLine>& lines, int width,
                         int height, const MatchConfig& cfg,
                         int* outOfBoundsPoints, int* outOfBoundsLines) {
  GridIndex grid(width, height);
  int oobP = 0, oobL = 0;

  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    const auto cell = grid.cellOf(points[i].px);
    if (!cell) {
      ++oobP;
      continue;
    }
    grid.pointBuckets[GridIndex::flatten(*cell)].push_back(i);
  }
  // Keep at most maxPointsPerCell per cell, preferring higher response;
  // ties keep the smaller index.
  for (auto& bucket : grid.pointBuckets) {
    if (static_cast<int>(bucket.size()) <= cfg.maxPointsPerCell) continue;
    std::stable_sort(bucket.begin(), bucket.end(), [&](int x, int y) {
      return points[x].response > points[y].response;
    });
    bucket.resize(cfg.maxPointsPerCell);
    std::sort(bucket.begin(), bucket.end());
  }

  for (int i = 0; i < static_cast<int>(lines.size()); ++i) {
    const auto s = grid.cellOf(lines[i].start);
    const auto e = grid.cellOf(lines[i].end);
    if (!s || !e) {
      ++oobL;
      continue;
    }
    for (const GridCell& c :
         traverseCells(grid, lines[i].start, lines[i].end)) {
      grid.lineBuckets[GridIndex::flatten(c)].push_back(i);
    }
    const auto mid = grid.cellOf((lines[i].start + lines[i].end) / 2.0);
    if (mid) grid.lineMidBuckets[GridIndex::flatten(*mid)].push_back(i);
  }

  if (outOfBoundsPoints) *outOfBoundsPoints = oobP;
  if (outOfBoundsLines) *outOfBoundsLines = oobL;
  return grid;
}

namespace {

struct Candidate {
  double descDist = Descriptor::kNoMatch;
  double pixelDist = 0.0;
  int index = -1;

  bool betterThan(const Candidate& o) const {
    if (descDist != o.descDist) return descDist < o.descDist;
    if (pixelDist != o.pixelDist) return pixelDist < o.pixelDist;
    return index < o.index;
  }
  bool valid() const { return index >= 0 && std::isfinite(descDist); }
};

void consider(Candidate& best, double descDist, double pixelDist, int index) {
  if (!std::isfinite(descDist)) return;
  const Candidate c{descDist, pixelDist, index};
  if (!best.valid() || c.betterThan(best)) best = c;
}

bool stereoPixelRulesOk(const Vec2d& left, const Vec2d& right,
                        const MatchConfig& cfg) {
  return std::abs(left.y() - right.y()) <= cfg.epipolarTol &&
         left.x() - right.x() > cfg.minDisparity;
}

void logCell(std::vector<GridCell>* visited, const GridCell& c) {
  if (visited) visited->push_back(c);
}

std::vector<MatchPair> mutualMatches(const std::vector<Candidate>& bestRight,
                                     const std::vector<Candidate>& bestLeft) {
  std::vector<MatchPair> out;
  for (int i = 0; i < static_cast<int>(bestRight.size()); ++i) {
    if (!bestRight[i].valid()) continue;
    const int j = bestRight[i].index;
    if (bestLeft[j].valid() && bestLeft[j].index == i) out.push_back({i, j});
  }
  return out;
}

}  // namespace

std::vector<MatchPair> stereoMatchPoints(const std::vector<RawPoint>& left,
                                         const GridIndex& leftGrid,
                                         const std::vector<RawPoint>& right,
                                         const GridIndex& rightGrid,
                                         const MatchConfig& cfg,
                                         std::vector<GridCell>* visited) {
  const int c = cfg.horizontalSearchCells(leftGrid.width);
  std::vector<Candidate> bestRight(left.size());
  std::vector<Candidate> bestLeft(right.size());

  for (int row = 0; row < GridIndex::kRows; ++row) {
    for (int a = 0; a < GridIndex::kCols; ++a) {
      const GridCell cell{a, row};
      for (int i : leftGrid.pointsIn(cell)) {
        for (int a2 = std::max(0, a - c); a2 <= a; ++a2) {
          const GridCell rc{a2, row};
          logCell(visited, rc);
          for (int j : rightGrid.pointsIn(rc)) {
            if (!stereoPixelRulesOk(left[i].px, right[j].px, cfg)) continue;
            consider(bestRight[i],
                     Descriptor::distance(left[i].desc, right[j].desc),
                     (left[i].px - right[j].px).norm(), j);
          }
        }
      }
      for (int j : rightGrid.pointsIn(cell)) {
        for (int a2 = a; a2 <= std::min(GridIndex::kCols - 1, a + c); ++a2) {
          const GridCell lc{a2, row};
          logCell(visited, lc);
          for (int i : leftGrid.pointsIn(lc)) {
            if (!stereoPixelRulesOk(left[i].px, right[j].px, cfg)) continue;
            consider(bestLeft[j],
                     Descriptor::distance(left[i].desc, right[j].desc),
                     (left[i].px - right[j].px).norm(), i);
          }
        }
      }
    }
  }
  return mutualMatches(bestRight, bestLeft);
}

std::vector<MatchPair> stereoMatchLines(const std::vector<RawLine>& left,
                                        const GridIndex& leftGrid,
                                        const std::vector<RawLine>& right,
                                        const GridIndex& rightGrid,
                                        const MatchConfig& cfg,
                                        std::vector<GridCell>* visited) {
  const int c = cfg.horizontalSearchCells(leftGrid.width);

  // Candidates are enumerated from buckets keyed by the start endpoint;
  // the end endpoint's range is then verified per candidate.
  auto bucketByStart = [](const std::vector<RawLine>& lines,
                          const GridIndex& grid) {
    std::vector<std::vector<int>> buckets(GridIndex::kCols * GridIndex::kRows);
    for (int i = 0; i < static_cast<int>(lines.size()); ++i) {
      if (const auto cell = grid.cellOf(lines[i].start)) {
        buckets[GridIndex::flatten(*cell)].push_back(i);
      }
    }
    return buckets;
  };
  const auto rightByStart = bucketByStart(right, rightGrid);
  const auto leftByStart = bucketByStart(left, leftGrid);

  // Right candidate j for left line i: start and end cells each within the
  // horizontal range of the matching left endpoint, same row.
  auto cellRuleOk = [&](const RawLine& l, const RawLine& r) {
    const auto ls = leftGrid.cellOf(l.start), le = leftGrid.cellOf(l.end);
    const auto rs = rightGrid.cellOf(r.start), re = rightGrid.cellOf(r.end);
    if (!ls || !le || !rs || !re) return false;
    const auto inRange = [&](const GridCell& lc, const GridCell& rc) {
      return rc.b == lc.b && rc.a <= lc.a && rc.a >= lc.a - c;
    };
    return inRange(*ls, *rs) && inRange(*le, *re);
  };
  auto pixelRulesOk = [&](const RawLine& l, const RawLine& r) {
    return stereoPixelRulesOk(l.start, r.start, cfg) &&
           stereoPixelRulesOk(l.end, r.end, cfg);
  };
  auto pixelDist = [](const RawLine& l, const RawLine& r) {
    return (l.start - r.start).norm() + (l.end - r.end).norm();
  };

  std::vector<Candidate> bestRight(left.size());
  std::vector<Candidate> bestLeft(right.size());

  for (int i = 0; i < static_cast<int>(left.size()); ++i) {
    const auto ls = leftGrid.cellOf(left[i].start);
    if (!ls) continue;
    for (int a2 = std::max(0, ls->a - c); a2 <= ls->a; ++a2) {
      const GridCell rc{a2, ls->b};
      logCell(visited, rc);
      for (int j : rightByStart[GridIndex::flatten(rc)]) {
        if (!cellRuleOk(left[i], right[j]) ||
            !pixelRulesOk(left[i], right[j]))
          continue;
        consider(bestRight[i],
                 Descriptor::distance(left[i].desc, right[j].desc),
                 pixelDist(left[i], right[j]), j);
      }
    }
  }
  for (int j = 0; j < static_cast<int>(right.size()); ++j) {
    const auto rs = rightGrid.cellOf(right[j].start);
    if (!rs) continue;
    for (int a2 = rs->a; a2 <= std::min(GridIndex::kCols - 1, rs->a + c);
         ++a2) {
      const GridCell lc{a2, rs->b};
      logCell(visited, lc);
      for (int i : leftByStart[GridIndex::flatten(lc)]) {
        if (!cellRuleOk(left[i], right[j]) ||
            !pixelRulesOk(left[i], right[j]))
          continue;
        consider(bestLeft[j],
                 Descriptor::distance(left[i].desc, right[j].desc),
                 pixelDist(left[i], right[j]), i);
      }
    }
  }
  return mutualMatches(bestRight, bestLeft);
}

StereoFrame makeStereoFrame(const RawFrame& raw, const CameraModeld& cam,
                            const MatchConfig& cfg) {
  StereoFrame frame;
  frame.frameId = raw.frameId;

  int oobLeftP = 0, oobLeftL = 0, oobRightP = 0, oobRightL = 0;
  const GridIndex leftGrid =
      buildGridIndex(raw.leftPoints, raw.leftLines, cam.width, cam.height,
                     cfg, &oobLeftP, &oobLeftL);
  const GridIndex rightGrid =
      buildGridIndex(raw.rightPoints, raw.rightLines, cam.width, cam.height,
                     cfg, &oobRightP, &oobRightL);
  frame.counts.outOfBoundsPoints = oobLeftP + oobRightP;
  frame.counts.outOfBoundsLines = oobLeftL + oobRightL;

  for (const MatchPair& m : stereoMatchPoints(raw.leftPoints, leftGrid,
                                              raw.rightPoints, rightGrid,
                                              cfg)) {
    const RawPoint& l = raw.leftPoints[m.left];
    const RawPoint& r = raw.rightPoints[m.right];
    PointObservation obs;
    obs.id = l.id;
    obs.uL = l.px.x();
    obs.vL = l.px.y();
    obs.uR = r.px.x();
    obs.vR = r.px.y();
    obs.desc = l.desc;
    obs.response = l.response;
    frame.points.push_back(obs);
    frame.pointLandmarks.push_back(
        triangulateStereoPoint(obs.uL, obs.vL, obs.uR, cam,
                               cfg.minDisparity));
  }

  for (const MatchPair& m : stereoMatchLines(raw.leftLines, leftGrid,
                                             raw.rightLines, rightGrid,
                                             cfg)) {
    const RawLine& l = raw.leftLines[m.left];
    const RawLine& r = raw.rightLines[m.right];
    const Vec3d Xs = triangulateStereoPoint(l.start.x(), l.start.y(),
                                            r.start.x(), cam,
                                            cfg.minDisparity);
    const Vec3d Xe = triangulateStereoPoint(l.end.x(), l.end.y(), r.end.x(),
                                            cam, cfg.minDisparity);
    if ((Xs - Xe).norm() < 1e-9) {
      ++frame.counts.degenerateLines;
      continue;
    }
    LineObservation obs;
    obs.id = l.id;
    obs.startL = l.start;
    obs.endL = l.end;
    obs.startR = r.start;
    obs.endR = r.end;
    obs.desc = l.desc;
    obs.response = l.response;
    frame.lines.push_back(obs);
    frame.lineSegments.emplace_back(Xs, Xe);
    frame.lineLandmarks.push_back(
        pluckerFromEndpoints(Xs, Xe).normalized());
  }

  // Re-index the matched observations for tracking and cell scoring.
  std::vector<RawPoint> matchedPts(frame.points.size());
  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    matchedPts[i].px = Vec2d(frame.points[i].uL, frame.points[i].vL);
    matchedPts[i].response = frame.points[i].response;
  }
  std::vector<RawLine> matchedLines(frame.lines.size());
  for (std::size_t i = 0; i < frame.lines.size(); ++i) {
    matchedLines[i].start = frame.lines[i].startL;
    matchedLines[i].end = frame.lines[i].endL;
    matchedLines[i].response = frame.lines[i].response;
  }
  frame.grid = buildGridIndex(matchedPts, matchedLines, cam.width,
                              cam.height, cfg);
  return frame;
}

Correspondences trackTemporal(const StereoFrame& prev,
                              const StereoFrame& curr, const Posed& T_pred,
                              const CameraModeld& cam, const MatchConfig& cfg,
                              std::vector<GridCell>* visited) {
  Correspondences out;

  struct Projection {
    bool valid = false;
    Vec2d px = Vec2d::Zero();
    GridCell cell;
  };

  auto projectInto = [&](const Vec3d& P) {
    Projection proj;
    const Vec3d Pc = T_pred * P;
    if (Pc.z() <= cfg.zMin) return proj;
    const Vec2d px(cam.fx * Pc.x() / Pc.z() + cam.cx,
                   cam.fy * Pc.y() / Pc.z() + cam.cy);
    const auto cell = curr.grid.cellOf(px);
    if (!cell) return proj;
    proj.valid = true;
    proj.px = px;
    proj.cell = *cell;
    return proj;
  };

  auto neighborhood3x3 = [&](const GridCell& center, auto&& fn) {
    for (int db = -1; db <= 1; ++db) {
      for (int da = -1; da <= 1; ++da) {
        const int a = center.a + da, b = center.b + db;
        if (a < 0 || a >= GridIndex::kCols || b < 0 || b >= GridIndex::kRows)
          continue;
        const GridCell c{a, b};
        logCell(visited, c);
        fn(c);
      }
    }
  };

  auto cellsAdjacent = [](const GridCell& x, const GridCell& y) {
    return std::abs(x.a - y.a) <= 1 && std::abs(x.b - y.b) <= 1;
  };

  // --- points ---
  std::vector<Projection> prevProj(prev.points.size());
  std::vector<std::vector<int>> prevByCell(GridIndex::kCols *
                                           GridIndex::kRows);
  for (int i = 0; i < static_cast<int>(prev.points.size()); ++i) {
    prevProj[i] = projectInto(prev.pointLandmarks[i]);
    if (prevProj[i].valid) {
      prevByCell[GridIndex::flatten(prevProj[i].cell)].push_back(i);
    }
  }

  std::vector<Candidate> bestCurr(prev.points.size());
  std::vector<Candidate> bestPrev(curr.points.size());
  for (int i = 0; i < static_cast<int>(prev.points.size()); ++i) {
    if (!prevProj[i].valid) continue;
    neighborhood3x3(prevProj[i].cell, [&](const GridCell& c) {
      for (int j : curr.grid.pointsIn(c)) {
        const Vec2d obs(curr.points[j].uL, curr.points[j].vL);
        const double dist = (obs - prevProj[i].px).norm();
        if (dist > cfg.searchRadiusPx) continue;
        consider(bestCurr[i],
                 Descriptor::distance(prev.points[i].desc,
                                      curr.points[j].desc),
                 dist, j);
      }
    });
  }
  for (const auto& bucket : curr.grid.pointBuckets) {
    for (int j : bucket) {
      const Vec2d obs(curr.points[j].uL, curr.points[j].vL);
      const auto jc = curr.grid.cellOf(obs);
      if (!jc) continue;
      neighborhood3x3(*jc, [&](const GridCell& c) {
        for (int i : prevByCell[GridIndex::flatten(c)]) {
          if (!cellsAdjacent(prevProj[i].cell, *jc)) continue;
          const double dist = (obs - prevProj[i].px).norm();
          if (dist > cfg.searchRadiusPx) continue;
          consider(bestPrev[j],
                   Descriptor::distance(prev.points[i].desc,
                                        curr.points[j].desc),
                   dist, i);
        }
      });
    }
  }
  for (const MatchPair& m :
       mutualMatches(bestCurr, bestPrev)) {
    out.points.push_back({m.left, m.right});
  }

  // --- lines, tracked through their projected 3D midpoints ---
  std::vector<Projection> prevMidProj(prev.lines.size());
  std::vector<std::vector<int>> prevLineByCell(GridIndex::kCols *
                                               GridIndex::kRows);
  for (int i = 0; i < static_cast<int>(prev.lines.size()); ++i) {
    prevMidProj[i] = projectInto(prev.lineSegments[i].midpoint());
    if (prevMidProj[i].valid) {
      prevLineByCell[GridIndex::flatten(prevMidProj[i].cell)].push_back(i);
    }
  }

  std::vector<Candidate> bestCurrL(prev.lines.size());
  std::vector<Candidate> bestPrevL(curr.lines.size());
  for (int i = 0; i < static_cast<int>(prev.lines.size()); ++i) {
    if (!prevMidProj[i].valid) continue;
    neighborhood3x3(prevMidProj[i].cell, [&](const GridCell& c) {
      for (int j : curr.grid.lineMidpointsIn(c)) {
        const double dist =
            (curr.lines[j].midpointL() - prevMidProj[i].px).norm();
        if (dist > cfg.searchRadiusPx) continue;
        consider(bestCurrL[i],
                 Descriptor::distance(prev.lines[i].desc, curr.lines[j].desc),
                 dist, j);
      }
    });
  }
  for (int j = 0; j < static_cast<int>(curr.lines.size()); ++j) {
    const auto jc = curr.grid.cellOf(curr.lines[j].midpointL());
    if (!jc) continue;
    neighborhood3x3(*jc, [&](const GridCell& c) {
      for (int i : prevLineByCell[GridIndex::flatten(c)]) {
        if (!cellsAdjacent(prevMidProj[i].cell, *jc)) continue;
        const double dist =
            (curr.lines[j].midpointL() - prevMidProj[i].px).norm();
        if (dist > cfg.searchRadiusPx) continue;
        consider(bestPrevL[j],
                 Descriptor::distance(prev.lines[i].desc, curr.lines[j].desc),
                 dist, i);
      }
    });
  }
  for (const MatchPair& m : mutualMatches(bestCurrL, bestPrevL)) {
    out.lines.push_back({m.left, m.right});
  }
  return out;
}

}  // namespace plvo
