#pragma once

// Shortest round-trip decimal formatting for doubles, used by every CSV and
// text emitter so identical numbers always serialize to identical bytes.

#include <charconv>
#include <string>
#include <system_error>

#include "alphaq/errors.hpp"

namespace alphaq {

inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    if (res.ec != std::errc()) {
        throw Error("failed to format a double");
    }
    return std::string(buf, res.ptr);
}

} // namespace alphaq
