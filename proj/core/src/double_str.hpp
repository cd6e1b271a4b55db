#pragma once

#include <charconv>
#include <string>

namespace aaamdp::detail {

// Shortest decimal form that round-trips the exact double. Locale-free, so
// output is byte-stable across runs.
inline std::string double_str(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace aaamdp::detail
