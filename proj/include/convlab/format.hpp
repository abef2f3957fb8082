#pragma once

#include <cstdio>
#include <string>

namespace convlab {

/// Fixed 17-significant-digit rendering, so emitted tables are byte-stable
/// across runs and round-trip through parsing.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace convlab
