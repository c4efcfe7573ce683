#pragma once
// Locale-independent numeric formatting shared by the writers: '%.17g'
// round-trips every double exactly.

#include <cstdio>
#include <string>

namespace chs::detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace chs::detail
