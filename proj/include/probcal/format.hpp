#pragma once

// Decimal formatting used for every number the toolkit writes. to_chars emits
// the shortest representation that parses back to the identical double, so
// rereading a file and writing it again reproduces the same bytes.

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "probcal/errors.hpp"

namespace probcal {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        raise(errc::parse_error, "bad number '" + std::string(text) + "'");
    return v;
}

inline long long parse_int(std::string_view text) {
    long long v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        raise(errc::parse_error, "bad integer '" + std::string(text) + "'");
    return v;
}

} // namespace probcal
