#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace davg {

inline constexpr const char* kToolVersion = "0.1.0";

// All numeric CSV fields are written with 17 significant digits so a
// round-trip through text reproduces the exact double.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// FNV-1a, used to stamp output files with a digest of the config they came from.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace davg
