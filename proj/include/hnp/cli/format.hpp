#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <system_error>

namespace hnp::cli {

/// Shortest round-trip decimal form; identical bytes on every run.
inline std::string format_number(double v) {
    if (v == 0.0) return "0"; // folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_vector(std::span<const double> v, std::string_view sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += format_number(v[i]);
    }
    return out;
}

inline std::string format_bool(bool b) { return b ? "true" : "false"; }

/// a / b reduced with exact integer arithmetic, e.g. "100" or "3/2".
inline std::string format_ratio(std::size_t a, std::size_t b) {
    if (b == 0) return "undefined";
    const std::size_t g = std::gcd(a, b);
    a /= g;
    b /= g;
    return b == 1 ? std::to_string(a) : std::to_string(a) + "/" + std::to_string(b);
}

} // namespace hnp::cli
