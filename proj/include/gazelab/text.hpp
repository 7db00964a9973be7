#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gazelab/error.hpp"

namespace gazelab {

/// Shortest round-trip decimal form of a double. Reparsing the returned
/// text recovers the exact bit pattern, which is what makes log and
/// report files rerun-stable.
inline std::string fmt_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline std::string fmt_int(std::int64_t value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

/// Fixed significant digits, for axis ticks and labels where the shortest
/// round-trip form would leak float dust like 0.30000000000000004.
inline std::string fmt_sig(double value, int digits) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, std::string_view what) {
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw Error(ErrorCode::ParseError,
                    "bad number '" + std::string(text) + "' in " + std::string(what));
    }
    return value;
}

inline std::int64_t parse_int(std::string_view text, std::string_view what) {
    std::int64_t value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw Error(ErrorCode::ParseError,
                    "bad integer '" + std::string(text) + "' in " + std::string(what));
    }
    return value;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

} // namespace gazelab
