#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace superrad::detail {

// Fixed, locale-independent formatting so repeated runs write identical bytes.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0; // drop the sign of negative zero
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

} // namespace superrad::detail
