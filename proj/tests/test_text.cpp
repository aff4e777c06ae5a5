#include <doctest.h>

#include "motorfault/errors.hpp"
#include "motorfault/text.hpp"

#include <cstdint>
#include <limits>
#include <string>

using namespace motorfault;

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.0, 1.0, -1.0, 0.1, 2.6610250000000001, 1e-300, 1e300,
                     3.141592653589793, -0.4907680000000002}) {
        CHECK(parse_double(format_double(v)) == v);
    }
}

TEST_CASE("format_double is shortest form") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(2.7007) == "2.7007");
    CHECK(format_double(-3.0) == "-3");
}

TEST_CASE("try_parse_double accepts plain decimals") {
    double v = 0;
    CHECK(try_parse_double("2.661025", v));
    CHECK(v == 2.661025);
    CHECK(try_parse_double("-0.5", v));
    CHECK(v == -0.5);
    CHECK(try_parse_double("1e3", v));
    CHECK(v == 1000.0);
}

TEST_CASE("try_parse_double rejects junk and partial parses") {
    double v = 0;
    CHECK_FALSE(try_parse_double("", v));
    CHECK_FALSE(try_parse_double("abc", v));
    CHECK_FALSE(try_parse_double("1.5x", v));
    CHECK_FALSE(try_parse_double(" 1.5", v));
    CHECK_FALSE(try_parse_double("1.5 ", v));
    CHECK_FALSE(try_parse_double("1,5", v));
}

TEST_CASE("parse_double throws ParseError on junk") {
    CHECK_THROWS_AS(parse_double("zap"), ParseError);
}

TEST_CASE("integer parses are strict") {
    std::int64_t i = 0;
    CHECK(try_parse_int("-42", i));
    CHECK(i == -42);
    CHECK_FALSE(try_parse_int("4.2", i));
    CHECK_FALSE(try_parse_int("", i));
    std::uint64_t u = 0;
    CHECK(try_parse_uint("18446744073709551615", u));
    CHECK(u == std::numeric_limits<std::uint64_t>::max());
    CHECK_FALSE(try_parse_uint("-1", u));
}

TEST_CASE("split keeps empty fields") {
    auto fields = split("a,b,c", ',');
    REQUIRE(fields.size() == 3);
    CHECK(fields[0] == "a");
    CHECK(fields[2] == "c");

    fields = split(",x,", ',');
    REQUIRE(fields.size() == 3);
    CHECK(fields[0] == "");
    CHECK(fields[1] == "x");
    CHECK(fields[2] == "");

    fields = split("", ',');
    REQUIRE(fields.size() == 1);
    CHECK(fields[0] == "");
}

TEST_CASE("strip_cr drops one trailing carriage return") {
    CHECK(strip_cr("abc\r") == "abc");
    CHECK(strip_cr("abc") == "abc");
    CHECK(strip_cr("\r") == "");
    CHECK(strip_cr("a\r\r") == "a\r");
}
