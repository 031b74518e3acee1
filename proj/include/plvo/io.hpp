#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "plvo/observations.hpp"
#include "plvo/types.hpp"

namespace plvo {

struct TrajectoryEntry {
  std::int64_t frameId = 0;
  Posed pose;  // camera-to-world
};
using Trajectory = std::vector<TrajectoryEntry>;

enum class TrajectoryFormat { Kitti, Tum };

/// Calibration loader. Accepts either a single line
/// `fx fy cx cy baseline width height` or KITTI-style `P0:`/`P1:`
/// projection rows (baseline = -P1[0,3] / fx; image size from an optional
/// `S: width height` row, defaulting to 1241x376). Throws
/// std::runtime_error with the offending line number on malformed or
/// nonpositive values.
CameraModeld loadCalibration(const std::string& path);

void saveCalibration(const std::string& path, const CameraModeld& cam);

/// Feature observation file: one record per line,
///   frame cam kind id u v [desc [response]]           for kind P
///   frame cam kind id us vs ue ve [desc [response]]   for kind L
/// with cam in {L,R}. Records must be grouped by nondecreasing frame id.
/// Out-of-bounds coordinates are skipped and counted.
std::vector<RawFrame> loadFeatures(const std::string& path,
                                   const CameraModeld& cam,
                                   int* skippedOutOfBounds = nullptr);

void saveFeatures(const std::string& path,
                  const std::vector<RawFrame>& frames);

/// KITTI format: 12 numbers per line, row-major [R|t].
/// TUM format: `timestamp tx ty tz qx qy qz qw` with a unit quaternion.
void writeTrajectory(const std::string& path, const Trajectory& traj,
                     TrajectoryFormat fmt);

/// Reads either format; 12-column lines parse as KITTI (frame id = line
/// index), 8-column lines as TUM.
Trajectory readTrajectory(const std::string& path);
Trajectory readTrajectory(const std::string& path, TrajectoryFormat fmt);

/// Plain-text `key = value` configuration; '#' starts a comment. Repeated
/// keys keep the last value.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig fromFile(const std::string& path);
  static KeyValueConfig fromString(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  double getDouble(const std::string& key, double fallback) const;
  int getInt(const std::string& key, int fallback) const;
  bool getBool(const std::string& key, bool fallback) const;
  std::string getString(const std::string& key,
                        const std::string& fallback) const;
  std::vector<double> getDoubles(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace plvo
