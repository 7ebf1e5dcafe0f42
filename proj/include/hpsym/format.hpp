#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace hpsym {

inline constexpr const char* kVersion = "0.1.0";

// Reals print as lower-case scientific with 12 significant digits,
// locale-independent; the same bytes on every run is part of the contract.
inline std::string fmt_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.11e", x);
  return buf;
}

inline std::string fmt_int(long x) { return std::to_string(x); }

}  // namespace hpsym
