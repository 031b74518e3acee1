#include "plvo/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>

#include "plvo/camera.hpp"
#include "plvo/lie.hpp"

namespace plvo {

namespace {

struct StereoPixels {
  Vec2d left, right;
};

/// Noiseless stereo projection; empty when the point is not cleanly
/// visible (depth, borders, disparity).
std::optional<StereoPixels> projectVisible(const Vec3d& Pworld,
                                           const Posed& worldFromCam,
                                           const SyntheticSceneConfig& cfg) {
  const CameraModeld& cam = cfg.cam;
  const Vec3d Pc = worldFromCam.inverse() * Pworld;
  if (Pc.z() < 0.5) return std::nullopt;
  StereoPixels px;
  px.left = Vec2d(cam.fx * Pc.x() / Pc.z() + cam.cx,
                  cam.fy * Pc.y() / Pc.z() + cam.cy);
  px.right = Vec2d(cam.fx * (Pc.x() - cam.baseline) / Pc.z() + cam.cx,
                   cam.fy * Pc.y() / Pc.z() + cam.cy);
  const double m = cfg.marginPx;
  auto ok = [&](const Vec2d& p) {
    return p.x() >= m && p.x() < cam.width - m && p.y() >= m &&
           p.y() < cam.height - m;
  };
  if (!ok(px.left) || !ok(px.right)) return std::nullopt;
  if (px.left.x() - px.right.x() < cfg.minSpawnDisparity) return std::nullopt;
  return px;
}

struct ScenePoint {
  std::int64_t id = 0;
  Vec3d base = Vec3d::Zero();     // world position at frame 0
  Vec3d velocity = Vec3d::Zero();  // zero for static features
  bool dynamic = false;

  Vec3d at(int frame) const { return base + frame * velocity; }
};

struct SceneLine {
  std::int64_t id = 0;
  Vec3d baseStart = Vec3d::Zero(), baseEnd = Vec3d::Zero();
  Vec3d velocity = Vec3d::Zero();
  bool dynamic = false;

  Vec3d startAt(int frame) const { return baseStart + frame * velocity; }
  Vec3d endAt(int frame) const { return baseEnd + frame * velocity; }
};

class Generator {
 public:
  explicit Generator(const SyntheticSceneConfig& cfg)
      : cfg_(cfg), rng_(cfg.seed) {}

  SyntheticScene run() {
    SyntheticScene scene;
    scene.cam = cfg_.cam;

    // Camera path: W_k = W_{k-1} * exp(step_k).
    std::vector<Posed> poses(cfg_.nFrames);
    poses[0] = Posed::Identity();
    for (int k = 1; k < cfg_.nFrames; ++k) {
      poses[k] = poses[k - 1] * se3Exp(stepTwist(k - 1));
    }

    spawnObjects(poses[0], cfg_.nFrames > 1 ? poses[1] : poses[0]);

    scene.frames.resize(cfg_.nFrames);
    for (int k = 0; k < cfg_.nFrames; ++k) {
      const Posed& W = poses[k];
      const Posed& Wnext = poses[std::min(k + 1, cfg_.nFrames - 1)];
      retireInvisible(k, W);
      replenishStatics(k, W, Wnext);
      emitFrame(k, W, &scene.frames[k]);
      scene.groundTruth.push_back({k, W});
    }
    scene.labels = labels_;
    return scene;
  }

 private:
  Twistd stepTwist(int k) const {
    if (cfg_.pathTwists.empty()) return Twistd::Zero();
    if (static_cast<int>(cfg_.pathTwists.size()) == 1) {
      return cfg_.pathTwists[0];
    }
    if (k >= static_cast<int>(cfg_.pathTwists.size())) {
      return cfg_.pathTwists.back();
    }
    return cfg_.pathTwists[k];
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

  Vec3d randomUnit() {
    // Rejection-sampled direction, deterministic per seed.
    for (;;) {
      Vec3d v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
      const double n = v.norm();
      if (n > 1e-3 && n <= 1.0) return v / n;
    }
  }

  Vec3d sampleInFrustum(const Posed& W) {
    const double z = uniform(cfg_.depthMin, cfg_.depthMax);
    const double disparity = cfg_.cam.fx * cfg_.cam.baseline / z;
    const double uLo = cfg_.marginPx + std::max(0.0, disparity);
    const double uHi = cfg_.cam.width - cfg_.marginPx;
    const double u = uniform(std::min(uLo, uHi - 1.0), uHi);
    const double v = uniform(cfg_.marginPx, cfg_.cam.height - cfg_.marginPx);
    const Vec3d Pc((u - cfg_.cam.cx) * z / cfg_.cam.fx,
                   (v - cfg_.cam.cy) * z / cfg_.cam.fy, z);
    return W * Pc;
  }

  bool visibleBoth(const Vec3d& P, const Posed& W, const Posed& Wnext) {
    return projectVisible(P, W, cfg_) && projectVisible(P, Wnext, cfg_);
  }

  void spawnObjects(const Posed& W0, const Posed& W1) {
    for (const DynamicObjectConfig& obj : cfg_.objects) {
      for (int i = 0; i < obj.nPoints; ++i) {
        ScenePoint p;
        p.dynamic = true;
        p.velocity = obj.velocity;
        bool placed = false;
        for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
          p.base = obj.center + obj.radius * Vec3d(uniform(-1, 1),
                                                   uniform(-1, 1),
                                                   uniform(-1, 1));
          placed = visibleBoth(p.base, W0, W1) &&
                   visibleBoth(p.base + p.velocity, W1, W1);
        }
        if (!placed) {
          throw std::runtime_error(
              "generateSynthetic: cannot place dynamic object feature");
        }
        p.id = nextId_++;
        labels_.push_back({p.id, true});
        points_.push_back(p);
      }
      for (int i = 0; i < obj.nLines; ++i) {
        SceneLine l;
        l.dynamic = true;
        l.velocity = obj.velocity;
        bool placed = false;
        for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
          const Vec3d mid = obj.center + obj.radius * Vec3d(uniform(-1, 1),
                                                            uniform(-1, 1),
                                                            uniform(-1, 1));
          const Vec3d dir = randomUnit();
          const double half = uniform(cfg_.lineLenMin, cfg_.lineLenMax) / 2.0;
          l.baseStart = mid + half * dir;
          l.baseEnd = mid - half * dir;
          placed = visibleBoth(l.baseStart, W0, W1) &&
                   visibleBoth(l.baseEnd, W0, W1);
        }
        if (!placed) {
          throw std::runtime_error(
              "generateSynthetic: cannot place dynamic object line");
        }
        l.id = nextId_++;
        labels_.push_back({l.id, true});
        lines_.push_back(l);
      }
    }
  }

  void retireInvisible(int frame, const Posed& W) {
    std::erase_if(points_, [&](const ScenePoint& p) {
      return !projectVisible(p.at(frame), W, cfg_);
    });
    std::erase_if(lines_, [&](const SceneLine& l) {
      return !projectVisible(l.startAt(frame), W, cfg_) ||
             !projectVisible(l.endAt(frame), W, cfg_);
    });
  }

  void replenishStatics(int frame, const Posed& W, const Posed& Wnext) {
    int staticPoints = 0, staticLines = 0;
    for (const ScenePoint& p : points_) staticPoints += p.dynamic ? 0 : 1;
    for (const SceneLine& l : lines_) staticLines += l.dynamic ? 0 : 1;

    while (staticPoints < cfg_.nStaticPoints) {
      ScenePoint p;
      bool placed = false;
      for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
        p.base = sampleInFrustum(W);
        placed = visibleBoth(p.base, W, Wnext);
      }
      if (!placed) {
        throw std::runtime_error(
            "generateSynthetic: cannot place static point");
      }
      p.id = nextId_++;
      labels_.push_back({p.id, false});
      points_.push_back(p);
      ++staticPoints;
    }
    while (staticLines < cfg_.nStaticLines) {
      SceneLine l;
      bool placed = false;
      for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
        const Vec3d mid = sampleInFrustum(W);
        const Vec3d dir = randomUnit();
        const double half = uniform(cfg_.lineLenMin, cfg_.lineLenMax) / 2.0;
        l.baseStart = mid + half * dir;
        l.baseEnd = mid - half * dir;
        placed = visibleBoth(l.baseStart, W, Wnext) &&
                 visibleBoth(l.baseEnd, W, Wnext);
      }
      if (!placed) {
        throw std::runtime_error(
            "generateSynthetic: cannot place static line");
      }
      l.id = nextId_++;
      labels_.push_back({l.id, false});
      lines_.push_back(l);
      ++staticLines;
    }
    (void)frame;
  }

  double noisy(double x) {
    if (cfg_.noiseSigma <= 0.0) return x;
    return x + std::normal_distribution<double>(0.0, cfg_.noiseSigma)(rng_);
  }

  Descriptor emitTag(std::int64_t id) {
    std::uint64_t tag = static_cast<std::uint64_t>(id);
    if (cfg_.corruptTagRate > 0.0 &&
        uniform(0.0, 1.0) < cfg_.corruptTagRate) {
      tag = 0x8000000000000000ull | corruptCounter_++;
    }
    return Descriptor::makeTag(tag);
  }

  void emitFrame(int frame, const Posed& W, RawFrame* out) {
    out->frameId = frame;
    for (const ScenePoint& p : points_) {
      const auto px = projectVisible(p.at(frame), W, cfg_);
      if (!px) continue;
      const Descriptor desc = emitTag(p.id);
      RawPoint l;
      l.id = p.id;
      l.px = Vec2d(noisy(px->left.x()), noisy(px->left.y()));
      l.desc = desc;
      l.response = 1.0;
      out->leftPoints.push_back(l);
      RawPoint r = l;
      r.px = Vec2d(noisy(px->right.x()), noisy(px->right.y()));
      out->rightPoints.push_back(r);
    }
    for (const SceneLine& sl : lines_) {
      const auto ps = projectVisible(sl.startAt(frame), W, cfg_);
      const auto pe = projectVisible(sl.endAt(frame), W, cfg_);
      if (!ps || !pe) continue;
      const Descriptor desc = emitTag(sl.id);
      RawLine l;
      l.id = sl.id;
      l.start = Vec2d(noisy(ps->left.x()), noisy(ps->left.y()));
      l.end = Vec2d(noisy(pe->left.x()), noisy(pe->left.y()));
      l.desc = desc;
      l.response = 1.0;
      out->leftLines.push_back(l);
      RawLine r = l;
      r.start = Vec2d(noisy(ps->right.x()), noisy(ps->right.y()));
      r.end = Vec2d(noisy(pe->right.x()), noisy(pe->right.y()));
      out->rightLines.push_back(r);
    }
  }

  SyntheticSceneConfig cfg_;
  std::mt19937_64 rng_;
  std::int64_t nextId_ = 0;
  std::uint64_t corruptCounter_ = 0;
  std::vector<ScenePoint> points_;
  std::vector<SceneLine> lines_;
  std::vector<SyntheticLabel> labels_;
};

}  // namespace

SyntheticScene generateSynthetic(const SyntheticSceneConfig& cfg) {
  if (!cfg.cam.valid() || cfg.nFrames < 1) {
    throw std::runtime_error("generateSynthetic: invalid scene config");
  }
  return Generator(cfg).run();
}

SyntheticSceneConfig sceneConfigFromKeyValues(const KeyValueConfig& kv) {
  SyntheticSceneConfig cfg;
  cfg.cam.fx = kv.getDouble("fx", cfg.cam.fx);
  cfg.cam.fy = kv.getDouble("fy", cfg.cam.fy);
  cfg.cam.cx = kv.getDouble("cx", cfg.cam.cx);
  cfg.cam.cy = kv.getDouble("cy", cfg.cam.cy);
  cfg.cam.baseline = kv.getDouble("baseline", cfg.cam.baseline);
  cfg.cam.width = kv.getInt("width", cfg.cam.width);
  cfg.cam.height = kv.getInt("height", cfg.cam.height);
  cfg.nFrames = kv.getInt("n_frames", cfg.nFrames);
  cfg.nStaticPoints = kv.getInt("n_static_points", cfg.nStaticPoints);
  cfg.nStaticLines = kv.getInt("n_static_lines", cfg.nStaticLines);
  cfg.noiseSigma = kv.getDouble("noise_sigma", cfg.noiseSigma);
  cfg.seed = static_cast<std::uint64_t>(kv.getDouble("seed", 1));
  cfg.depthMin = kv.getDouble("depth_min", cfg.depthMin);
  cfg.depthMax = kv.getDouble("depth_max", cfg.depthMax);
  cfg.marginPx = kv.getDouble("margin_px", cfg.marginPx);
  cfg.lineLenMin = kv.getDouble("line_len_min", cfg.lineLenMin);
  cfg.lineLenMax = kv.getDouble("line_len_max", cfg.lineLenMax);
  cfg.corruptTagRate = kv.getDouble("corrupt_tag_rate", cfg.corruptTagRate);

  if (kv.has("step_twist")) {
    const auto v = kv.getDoubles("step_twist");
    if (v.size() != 6) {
      throw std::runtime_error("step_twist: expected 6 values");
    }
    Twistd xi;
    for (int i = 0; i < 6; ++i) xi[i] = v[i];
    cfg.pathTwists.assign(1, xi);
  }
  for (int k = 0;; ++k) {
    const std::string key = "step_twist_" + std::to_string(k);
    if (!kv.has(key)) break;
    const auto v = kv.getDoubles(key);
    if (v.size() != 6) throw std::runtime_error(key + ": expected 6 values");
    if (static_cast<int>(cfg.pathTwists.size()) <= k) {
      cfg.pathTwists.resize(k + 1,
                            cfg.pathTwists.empty() ? Twistd::Zero()
                                                   : cfg.pathTwists.back());
    }
    for (int i = 0; i < 6; ++i) cfg.pathTwists[k][i] = v[i];
  }

  const int nObjects = kv.getInt("n_dynamic_objects", 0);
  for (int i = 0; i < nObjects; ++i) {
    const std::string prefix = "object" + std::to_string(i) + "_";
    DynamicObjectConfig obj;
    auto vec3 = [&](const std::string& key, Vec3d fallback) {
      if (!kv.has(key)) return fallback;
      const auto v = kv.getDoubles(key);
      if (v.size() != 3) throw std::runtime_error(key + ": expected 3 values");
      return Vec3d(v[0], v[1], v[2]);
    };
    obj.center = vec3(prefix + "center", obj.center);
    obj.velocity = vec3(prefix + "velocity", obj.velocity);
    obj.nPoints = kv.getInt(prefix + "points", obj.nPoints);
    obj.nLines = kv.getInt(prefix + "lines", obj.nLines);
    obj.radius = kv.getDouble(prefix + "radius", obj.radius);
    cfg.objects.push_back(obj);
  }
  return cfg;
}

void writeScene(const SyntheticScene& scene, const std::string& outDir) {
  namespace fs = std::filesystem;
  fs::create_directories(outDir);
  saveCalibration((fs::path(outDir) / "calib.txt").string(), scene.cam);
  saveFeatures((fs::path(outDir) / "features.txt").string(), scene.frames);
  writeTrajectory((fs::path(outDir) / "groundtruth.txt").string(),
                  scene.groundTruth, TrajectoryFormat::Kitti);
  std::ofstream labels((fs::path(outDir) / "labels.txt").string());
  if (!labels) throw std::runtime_error("cannot write labels.txt");
  for (const SyntheticLabel& l : scene.labels) {
    labels << l.id << " " << (l.dynamic ? 1 : 0) << "\n";
  }
}

std::vector<SyntheticLabel> readLabels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open labels: " + path);
  std::vector<SyntheticLabel> out;
  std::int64_t id;
  int dyn;
  while (in >> id >> dyn) out.push_back({id, dyn != 0});
  return out;
}

}  // namespace plvo
