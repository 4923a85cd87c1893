#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace soccersum {

// Fixed 6-decimal rendering used by every text artifact.
inline std::string format_fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Value as it reads back after a format_fixed6 round trip.
inline double quantize6(double v) { return std::strtod(format_fixed6(v).c_str(), nullptr); }

}  // namespace soccersum
