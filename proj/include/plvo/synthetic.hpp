#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plvo/io.hpp"
#include "plvo/observations.hpp"
#include "plvo/types.hpp"

namespace plvo {

/// Rigid cluster of features translating at a constant velocity, used to
/// inject a moving object into an otherwise static scene.
struct DynamicObjectConfig {
  Vec3d center = Vec3d(0, 0, 8);    // world frame at frame 0
  Vec3d velocity = Vec3d::Zero();   // m/frame, world frame
  int nPoints = 0;
  int nLines = 0;
  double radius = 1.0;              // feature spread, meters
};

struct SyntheticSceneConfig {
  CameraModeld cam{718.856, 718.856, 607.1928, 185.2157, 0.5372, 1241, 376};
  int nFrames = 2;
  int nStaticPoints = 60;  // visible-per-frame target, replenished on the fly
  int nStaticLines = 20;
  std::vector<DynamicObjectConfig> objects;
  /// Per-frame camera step in its own frame (pathTwists[k] moves frame k to
  /// k+1). A single entry repeats for the whole run; empty means a static
  /// camera.
  std::vector<Twistd> pathTwists;
  double noiseSigma = 0.0;  // px, applied to every emitted coordinate
  std::uint64_t seed = 1;
  double depthMin = 4.0, depthMax = 20.0;   // spawn depth range, meters
  double marginPx = 20.0;                   // keep spawns off the border
  double minSpawnDisparity = 1.0;           // px
  double lineLenMin = 0.5, lineLenMax = 2.5;  // meters
  double corruptTagRate = 0.0;  // chance an emitted tag is scrambled
};

struct SyntheticLabel {
  std::int64_t id = 0;
  bool dynamic = false;
};

struct SyntheticScene {
  CameraModeld cam;
  std::vector<RawFrame> frames;
  Trajectory groundTruth;  // camera-to-world, first pose identity
  std::vector<SyntheticLabel> labels;  // every feature ever emitted, by id
};

/// Renders a deterministic stereo sequence: static features are spawned in
/// the camera frustum and replenished as the camera moves past them,
/// dynamic objects translate rigidly, and every observation carries an
/// id-tag descriptor so association is exact unless corrupted. Throws
/// std::runtime_error when a feature placement cannot be made visible
/// within bounded retries.
SyntheticScene generateSynthetic(const SyntheticSceneConfig& cfg);

/// Scene-config text bridge (same `key = value` format as the run config).
SyntheticSceneConfig sceneConfigFromKeyValues(const KeyValueConfig& kv);

/// Writes calib.txt, features.txt, groundtruth.txt (KITTI format) and
/// labels.txt (`id 0|1` per feature) into outDir.
void writeScene(const SyntheticScene& scene, const std::string& outDir);

std::vector<SyntheticLabel> readLabels(const std::string& path);

}  // namespace plvo
