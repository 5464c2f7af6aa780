#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace orsop::sim::detail {

// Shortest representation that round-trips; locale independent.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace orsop::sim::detail
