#pragma once

#include <charconv>
#include <string>

namespace wcl {

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

}  // namespace wcl
