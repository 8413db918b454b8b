#pragma once

#include <cstdio>
#include <string>

namespace eqt {

/// Round-trippable decimal form: 17 significant digits.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace eqt
