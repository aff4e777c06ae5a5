#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace motorfault {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

// Strict full-string numeric parses: no leading/trailing junk, no whitespace.
// The try_* forms report failure by return value; the throwing forms raise
// ParseError without line context.
bool try_parse_double(std::string_view text, double& out);
bool try_parse_int(std::string_view text, std::int64_t& out);
bool try_parse_uint(std::string_view text, std::uint64_t& out);
double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

// Splits on every separator; n separators yield n+1 fields, empties kept.
std::vector<std::string_view> split(std::string_view line, char sep);

// Drops one trailing '\r' if present.
std::string_view strip_cr(std::string_view line);

}  // namespace motorfault
