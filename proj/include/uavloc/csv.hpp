#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

namespace uavloc {

// Shortest decimal representation that round-trips the double exactly
// (std::to_chars default), period decimal separator. Used for every numeric
// CSV cell so goldens can be compared byte-for-byte.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace uavloc
