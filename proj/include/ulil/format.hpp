#pragma once

#include <charconv>
#include <string>

namespace ulil {

// Shortest decimal form that round-trips the exact double. Locale-free,
// so files written through this are byte-stable across runs.
inline std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace ulil
