#pragma once

#include <cstdio>
#include <ostream>
#include <string>

namespace qarch::io {

// 17 significant digits guarantee double round-trip through text.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace qarch::io
