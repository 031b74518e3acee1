#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "plvo/types.hpp"

namespace plvo {

/// Feature descriptor. Two flavors share one slot: a 256-bit binary string
/// matched by Hamming distance, or a synthetic association tag matched by
/// exact equality (distance 0 or infinity). A tag stands in for a perfect
/// external matcher so the pipeline can be exercised without a detector.
struct Descriptor {
  enum class Kind { None, Tag, Binary };

  Kind kind = Kind::None;
  std::uint64_t tag = 0;
  std::array<std::uint64_t, 4> bits{};

  static Descriptor makeTag(std::uint64_t t) {
    Descriptor d;
    d.kind = Kind::Tag;
    d.tag = t;
    return d;
  }

  static constexpr double kNoMatch = std::numeric_limits<double>::infinity();

  static double distance(const Descriptor& a, const Descriptor& b) {
    if (a.kind != b.kind || a.kind == Kind::None) return kNoMatch;
    if (a.kind == Kind::Tag) return a.tag == b.tag ? 0.0 : kNoMatch;
    int bitsDiffer = 0;
    for (int i = 0; i < 4; ++i) {
      bitsDiffer += std::popcount(a.bits[i] ^ b.bits[i]);
    }
    return static_cast<double>(bitsDiffer);
  }

  /// Hex encoding; 64 hex characters decode as a 256-bit binary descriptor,
  /// anything shorter as a tag. Returns Kind::None on invalid input.
  static Descriptor fromHex(const std::string& hex);
  std::string toHex() const;
};

/// One detected point in one image.
struct RawPoint {
  std::int64_t id = -1;  // landmark identity in synthetic mode, else -1
  Vec2d px = Vec2d::Zero();
  Descriptor desc;
  double response = 0.0;
};

/// One detected segment in one image.
struct RawLine {
  std::int64_t id = -1;
  Vec2d start = Vec2d::Zero();
  Vec2d end = Vec2d::Zero();
  Descriptor desc;
  double response = 0.0;
};

/// Per-frame detector output for both cameras, before any matching.
struct RawFrame {
  std::int64_t frameId = 0;
  std::vector<RawPoint> leftPoints, rightPoints;
  std::vector<RawLine> leftLines, rightLines;
};

/// Stereo-matched point: left/right pixels merged into one record.
struct PointObservation {
  std::int64_t id = -1;
  double uL = 0, vL = 0, uR = 0, vR = 0;
  Descriptor desc;  // left-image descriptor
  double response = 0.0;
};

/// Stereo-matched segment with both cameras' endpoints.
struct LineObservation {
  std::int64_t id = -1;
  Vec2d startL = Vec2d::Zero(), endL = Vec2d::Zero();
  Vec2d startR = Vec2d::Zero(), endR = Vec2d::Zero();
  Descriptor desc;
  double response = 0.0;

  /// 2D midpoint of the left-image segment.
  Vec2d midpointL() const { return (startL + endL) / 2.0; }
};

}  // namespace plvo
