#include "plvo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Geometry>

namespace plvo {

namespace {

[[noreturn]] void parseError(const std::string& path, int line,
                             const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

bool parseDouble(const std::string& s, double* out) {
  try {
    std::size_t pos = 0;
    *out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(*out);
  } catch (...) {
    return false;
  }
}

bool blankOrComment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

CameraModeld loadCalibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open calibration file: " + path);

  CameraModeld cam;
  bool kittiMode = false;
  bool haveP0 = false, haveP1 = false, haveSimple = false;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (blankOrComment(line)) continue;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    if (tokens[0] == "P0:" || tokens[0] == "P1:") {
      kittiMode = true;
      if (tokens.size() != 13) {
        parseError(path, lineNo, "expected 12 projection values");
      }
      double p[12];
      for (int i = 0; i < 12; ++i) {
        if (!parseDouble(tokens[i + 1], &p[i])) {
          parseError(path, lineNo, "malformed number '" + tokens[i + 1] + "'");
        }
      }
      if (tokens[0] == "P0:") {
        cam.fx = p[0];
        cam.cx = p[2];
        cam.fy = p[5];
        cam.cy = p[6];
        haveP0 = true;
      } else {
        if (!haveP0) parseError(path, lineNo, "P1 before P0");
        cam.baseline = -p[3] / cam.fx;
        haveP1 = true;
      }
      continue;
    }
    if (tokens[0] == "S:" && kittiMode) {
      double w, h;
      if (tokens.size() != 3 || !parseDouble(tokens[1], &w) ||
          !parseDouble(tokens[2], &h)) {
        parseError(path, lineNo, "expected `S: width height`");
      }
      cam.width = static_cast<int>(w);
      cam.height = static_cast<int>(h);
      continue;
    }
    if (kittiMode) continue;  // ignore other KITTI rows (P2, Tr, ...)

    if (tokens.size() != 7) {
      parseError(path, lineNo,
                 "expected `fx fy cx cy baseline width height`");
    }
    double v[7];
    for (int i = 0; i < 7; ++i) {
      if (!parseDouble(tokens[i], &v[i])) {
        parseError(path, lineNo, "malformed number '" + tokens[i] + "'");
      }
    }
    cam.fx = v[0];
    cam.fy = v[1];
    cam.cx = v[2];
    cam.cy = v[3];
    cam.baseline = v[4];
    cam.width = static_cast<int>(v[5]);
    cam.height = static_cast<int>(v[6]);
    haveSimple = true;
    break;
  }

  if (kittiMode) {
    if (!haveP0 || !haveP1) {
      parseError(path, lineNo, "KITTI calibration needs both P0 and P1");
    }
    if (cam.width == 0) {
      cam.width = 1241;  // KITTI odometry default when no S row is given
      cam.height = 376;
    }
  } else if (!haveSimple) {
    parseError(path, lineNo, "no calibration line found");
  }
  if (!cam.valid()) {
    parseError(path, lineNo, "nonpositive calibration value");
  }
  return cam;
}

void saveCalibration(const std::string& path, const CameraModeld& cam) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write calibration: " + path);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.9f %.9f %.9f %.9f %.9f %d %d\n", cam.fx,
                cam.fy, cam.cx, cam.cy, cam.baseline, cam.width, cam.height);
  out << buf;
}

std::vector<RawFrame> loadFeatures(const std::string& path,
                                   const CameraModeld& cam,
                                   int* skippedOutOfBounds) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature file: " + path);

  std::vector<RawFrame> frames;
  int skipped = 0;
  std::string line;
  int lineNo = 0;
  auto inBounds = [&cam](double u, double v) {
    return u >= 0 && u < cam.width && v >= 0 && v < cam.height;
  };

  while (std::getline(in, line)) {
    ++lineNo;
    if (blankOrComment(line)) continue;
    auto tokens = tokenize(line);
    if (tokens.size() < 6) parseError(path, lineNo, "truncated record");

    double frameIdD;
    if (!parseDouble(tokens[0], &frameIdD)) {
      parseError(path, lineNo, "malformed frame id");
    }
    const std::int64_t frameId = static_cast<std::int64_t>(frameIdD);
    const std::string& camTok = tokens[1];
    const std::string& kindTok = tokens[2];
    if (camTok != "L" && camTok != "R") {
      parseError(path, lineNo, "camera must be L or R");
    }
    if (kindTok != "P" && kindTok != "L") {
      parseError(path, lineNo, "kind must be P or L");
    }

    if (frames.empty() || frames.back().frameId != frameId) {
      if (!frames.empty() && frames.back().frameId > frameId) {
        parseError(path, lineNo, "records not sorted by frame id");
      }
      frames.emplace_back();
      frames.back().frameId = frameId;
    }
    RawFrame& frame = frames.back();

    double idD;
    if (!parseDouble(tokens[3], &idD)) {
      parseError(path, lineNo, "malformed feature id");
    }
    const std::int64_t id = static_cast<std::int64_t>(idD);

    const std::size_t nCoords = (kindTok == "P") ? 2 : 4;
    const std::size_t base = 4;
    if (tokens.size() < base + nCoords ||
        tokens.size() > base + nCoords + 2) {
      parseError(path, lineNo, "wrong field count");
    }
    double coords[4];
    for (std::size_t i = 0; i < nCoords; ++i) {
      if (!parseDouble(tokens[base + i], &coords[i])) {
        parseError(path, lineNo, "malformed coordinate");
      }
    }
    Descriptor desc;
    double response = 0.0;
    if (tokens.size() > base + nCoords) {
      desc = Descriptor::fromHex(tokens[base + nCoords]);
      if (desc.kind == Descriptor::Kind::None) {
        parseError(path, lineNo, "malformed descriptor");
      }
    }
    if (tokens.size() > base + nCoords + 1) {
      if (!parseDouble(tokens[base + nCoords + 1], &response)) {
        parseError(path, lineNo, "malformed response");
      }
    }

    if (kindTok == "P") {
      if (!inBounds(coords[0], coords[1])) {
        ++skipped;
        continue;
      }
      RawPoint p;
      p.id = id;
      p.px = Vec2d(coords[0], coords[1]);
      p.desc = desc;
      p.response = response;
      (camTok == "L" ? frame.leftPoints : frame.rightPoints).push_back(p);
    } else {
      if (!inBounds(coords[0], coords[1]) || !inBounds(coords[2], coords[3])) {
        ++skipped;
        continue;
      }
      RawLine l;
      l.id = id;
      l.start = Vec2d(coords[0], coords[1]);
      l.end = Vec2d(coords[2], coords[3]);
      l.desc = desc;
      l.response = response;
      (camTok == "L" ? frame.leftLines : frame.rightLines).push_back(l);
    }
  }
  if (skippedOutOfBounds) *skippedOutOfBounds = skipped;
  return frames;
}

void saveFeatures(const std::string& path,
                  const std::vector<RawFrame>& frames) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write feature file: " + path);
  char buf[360];
  for (const RawFrame& f : frames) {
    auto writePoint = [&](const RawPoint& p, const char* camTok) {
      std::snprintf(buf, sizeof(buf), "%lld %s P %lld %.6f %.6f %s %.6f\n",
                    static_cast<long long>(f.frameId), camTok,
                    static_cast<long long>(p.id), p.px.x(), p.px.y(),
                    p.desc.toHex().c_str(), p.response);
      out << buf;
    };
    auto writeLine = [&](const RawLine& l, const char* camTok) {
      std::snprintf(buf, sizeof(buf),
                    "%lld %s L %lld %.6f %.6f %.6f %.6f %s %.6f\n",
                    static_cast<long long>(f.frameId), camTok,
                    static_cast<long long>(l.id), l.start.x(), l.start.y(),
                    l.end.x(), l.end.y(), l.desc.toHex().c_str(), l.response);
      out << buf;
    };
    for (const RawPoint& p : f.leftPoints) writePoint(p, "L");
    for (const RawPoint& p : f.rightPoints) writePoint(p, "R");
    for (const RawLine& l : f.leftLines) writeLine(l, "L");
    for (const RawLine& l : f.rightLines) writeLine(l, "R");
  }
}

void writeTrajectory(const std::string& path, const Trajectory& traj,
                     TrajectoryFormat fmt) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory: " + path);
  char buf[512];
  for (const TrajectoryEntry& entry : traj) {
    const Posed& T = entry.pose;
    if (fmt == TrajectoryFormat::Kitti) {
      std::snprintf(buf, sizeof(buf),
                    "%.9f %.9f %.9f %.9f %.9f %.9f %.9f %.9f %.9f %.9f %.9f "
                    "%.9f\n",
                    T.R(0, 0), T.R(0, 1), T.R(0, 2), T.t.x(), T.R(1, 0),
                    T.R(1, 1), T.R(1, 2), T.t.y(), T.R(2, 0), T.R(2, 1),
                    T.R(2, 2), T.t.z());
    } else {
      Eigen::Quaterniond q(T.R);
      q.normalize();
      std::snprintf(buf, sizeof(buf),
                    "%lld %.9f %.9f %.9f %.9f %.9f %.9f %.9f\n",
                    static_cast<long long>(entry.frameId), T.t.x(), T.t.y(),
                    T.t.z(), q.x(), q.y(), q.z(), q.w());
    }
    out << buf;
  }
}

Trajectory readTrajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory: " + path);

  Trajectory traj;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (blankOrComment(line)) continue;
    auto tokens = tokenize(line);
    std::vector<double> v(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (!parseDouble(tokens[i], &v[i])) {
        parseError(path, lineNo, "malformed number '" + tokens[i] + "'");
      }
    }
    TrajectoryEntry entry;
    if (v.size() == 12) {
      entry.frameId = static_cast<std::int64_t>(traj.size());
      entry.pose.R << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
      entry.pose.t = Vec3d(v[3], v[7], v[11]);
    } else if (v.size() == 8) {
      entry.frameId = static_cast<std::int64_t>(std::llround(v[0]));
      entry.pose.t = Vec3d(v[1], v[2], v[3]);
      Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
      if (q.norm() <= 0) parseError(path, lineNo, "zero quaternion");
      entry.pose.R = q.normalized().toRotationMatrix();
    } else {
      parseError(path, lineNo, "expected 12 (KITTI) or 8 (TUM) columns");
    }
    traj.push_back(entry);
  }
  return traj;
}

Trajectory readTrajectory(const std::string& path, TrajectoryFormat fmt) {
  Trajectory traj = readTrajectory(path);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (fmt == TrajectoryFormat::Kitti) {
      traj[i].frameId = static_cast<std::int64_t>(i);
    }
  }
  return traj;
}

KeyValueConfig KeyValueConfig::fromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return fromString(ss.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

KeyValueConfig KeyValueConfig::fromString(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  auto trim = [](std::string s) {
    const auto notSpace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notSpace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notSpace).base(), s.end());
    return s;
  };
  while (std::getline(in, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("line " + std::to_string(lineNo) +
                               ": expected `key = value`");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("line " + std::to_string(lineNo) +
                               ": empty key");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

double KeyValueConfig::getDouble(const std::string& key,
                                 double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double v;
  if (!parseDouble(it->second, &v)) {
    throw std::runtime_error("config key '" + key + "': malformed number '" +
                             it->second + "'");
  }
  return v;
}

int KeyValueConfig::getInt(const std::string& key, int fallback) const {
  return static_cast<int>(getDouble(key, fallback));
}

bool KeyValueConfig::getBool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "on" || it->second == "true" || it->second == "1") {
    return true;
  }
  if (it->second == "off" || it->second == "false" || it->second == "0") {
    return false;
  }
  throw std::runtime_error("config key '" + key + "': expected on/off");
}

std::string KeyValueConfig::getString(const std::string& key,
                                      const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::vector<double> KeyValueConfig::getDoubles(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return {};
  std::vector<double> out;
  for (const std::string& tok : tokenize(it->second)) {
    double v;
    if (!parseDouble(tok, &v)) {
      throw std::runtime_error("config key '" + key +
                               "': malformed number '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace plvo
