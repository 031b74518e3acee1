#include "plvo/observations.hpp"

#include <cctype>

namespace plvo {

namespace {

int hexVal(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Descriptor Descriptor::fromHex(const std::string& hex) {
  Descriptor d;
  if (hex.empty() || hex.size() > 64) return d;
  for (char c : hex) {
    if (hexVal(c) < 0) return d;
  }
  if (hex.size() == 64) {
    d.kind = Kind::Binary;
    for (int w = 0; w < 4; ++w) {
      std::uint64_t word = 0;
      for (int i = 0; i < 16; ++i) {
        word = (word << 4) | static_cast<std::uint64_t>(hexVal(hex[16 * w + i]));
      }
      d.bits[w] = word;
    }
  } else {
    d.kind = Kind::Tag;
    std::uint64_t tag = 0;
    for (char c : hex) {
      tag = (tag << 4) | static_cast<std::uint64_t>(hexVal(c));
    }
    d.tag = tag;
  }
  return d;
}

std::string Descriptor::toHex() const {
  static const char* digits = "0123456789abcdef";
  std::string out;
  if (kind == Kind::Tag) {
    // Shortest even-length encoding, at least two digits, below 64 chars.
    std::uint64_t t = tag;
    do {
      out.insert(out.begin(), digits[t & 0xF]);
      t >>= 4;
    } while (t != 0);
    if (out.size() % 2 != 0) out.insert(out.begin(), '0');
  } else if (kind == Kind::Binary) {
    out.reserve(64);
    for (int w = 0; w < 4; ++w) {
      for (int i = 15; i >= 0; --i) {
        out.push_back(digits[(bits[w] >> (4 * i)) & 0xF]);
      }
    }
  }
  return out;
}

}  // namespace plvo
