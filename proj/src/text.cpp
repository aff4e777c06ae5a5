#include "motorfault/text.hpp"

#include "motorfault/errors.hpp"

#include <charconv>
#include <system_error>

namespace motorfault {

std::string format_double(double value) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

namespace {

template <typename T>
bool parse_full(std::string_view text, T& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

bool try_parse_double(std::string_view text, double& out) {
    return parse_full(text, out);
}

bool try_parse_int(std::string_view text, std::int64_t& out) {
    return parse_full(text, out);
}

bool try_parse_uint(std::string_view text, std::uint64_t& out) {
    return parse_full(text, out);
}

double parse_double(std::string_view text) {
    double value;
    if (!try_parse_double(text, value))
        throw ParseError("bad number '" + std::string(text) + "'");
    return value;
}

std::int64_t parse_int(std::string_view text) {
    std::int64_t value;
    if (!try_parse_int(text, value))
        throw ParseError("bad integer '" + std::string(text) + "'");
    return value;
}

std::uint64_t parse_uint(std::string_view text) {
    std::uint64_t value;
    if (!try_parse_uint(text, value))
        throw ParseError("bad unsigned integer '" + std::string(text) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

}  // namespace motorfault
