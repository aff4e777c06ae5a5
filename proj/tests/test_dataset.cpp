#include <doctest.h>

#include "motorfault/dataset.hpp"
#include "motorfault/errors.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace motorfault;

namespace {

// Comparable row identity for multiset checks.
std::string row_key(const LabeledSample& row) {
    std::ostringstream key;
    key << class_code(row.label) << '|' << row.sample.v1 << '|' << row.sample.v2 << '|'
        << row.sample.v3 << '|' << row.sample.i1 << '|' << row.sample.i2 << '|'
        << row.sample.i3;
    return key.str();
}

std::vector<std::string> row_keys(const Dataset& data) {
    std::vector<std::string> keys;
    for (const auto& row : data.samples) keys.push_back(row_key(row));
    return keys;
}

}  // namespace

TEST_CASE("parse_csv reads a single data row") {
    Dataset data = parse_csv(
        "class,v1,v2,v3,i1,i2,i3\n"
        "1,2.661025,2.624276,2.701274,0.490768,0.478549,0.493368\n");
    REQUIRE(data.size() == 1);
    CHECK(data.samples[0].label == FaultClass::NoFault);
    CHECK(data.samples[0].sample.v1 == 2.661025);
    CHECK(data.samples[0].sample.v2 == 2.624276);
    CHECK(data.samples[0].sample.v3 == 2.701274);
    CHECK(data.samples[0].sample.i1 == 0.490768);
    CHECK(data.samples[0].sample.i2 == 0.478549);
    CHECK(data.samples[0].sample.i3 == 0.493368);
}

TEST_CASE("parse_csv accepts a header-only file") {
    CHECK(parse_csv("class,v1,v2,v3,i1,i2,i3\n").empty());
    CHECK(parse_csv("class,v1,v2,v3,i1,i2,i3").empty());  // no trailing newline
}

TEST_CASE("parse_csv accepts CRLF line endings") {
    Dataset data = parse_csv("class,v1,v2,v3,i1,i2,i3\r\n1,1,1,1,1,1,1\r\n");
    REQUIRE(data.size() == 1);
    CHECK(data.samples[0].sample.i3 == 1.0);
}

TEST_CASE("parse_csv rejects a bad header on line 1") {
    try {
        parse_csv("klass,v1,v2,v3,i1,i2,i3\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
    }
}

TEST_CASE("parse_csv rejects out-of-range class with the line number") {
    try {
        parse_csv("class,v1,v2,v3,i1,i2,i3\n1,1,1,1,1,1,1\n8,1,1,1,1,1,1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("out of range") != std::string::npos);
    }
}

TEST_CASE("parse_csv rejects wrong column counts and bad numbers") {
    CHECK_THROWS_AS(parse_csv("class,v1,v2,v3,i1,i2,i3\n1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("class,v1,v2,v3,i1,i2,i3\n1,1,1,x,1,1,1\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("class,v1,v2,v3,i1,i2,i3\n1,1,1,nan,1,1,1\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("class,v1,v2,v3,i1,i2,i3\n1.5,1,1,1,1,1,1\n"), ParseError);
    CHECK_THROWS_AS(parse_csv(""), ParseError);
}

TEST_CASE("csv round trip preserves every value bitwise") {
    Dataset original = table1_fixture();
    Dataset reparsed = parse_csv(to_csv(original));
    REQUIRE(reparsed.size() == original.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        CHECK(reparsed.samples[i].label == original.samples[i].label);
        CHECK(reparsed.samples[i].sample.v1 == original.samples[i].sample.v1);
        CHECK(reparsed.samples[i].sample.v3 == original.samples[i].sample.v3);
        CHECK(reparsed.samples[i].sample.i2 == original.samples[i].sample.i2);
    }
    // Serialization is a fixed point after one round trip.
    CHECK(to_csv(reparsed) == to_csv(original));
}

TEST_CASE("table1_fixture holds 14 rows, two per class, in order") {
    Dataset table = table1_fixture();
    REQUIRE(table.size() == 14);
    std::map<int, int> per_class;
    for (const auto& row : table.samples) ++per_class[class_code(row.label)];
    for (int code = 1; code <= 7; ++code) CHECK(per_class[code] == 2);
    for (std::size_t i = 0; i < 14; ++i)
        CHECK(class_code(table.samples[i].label) == static_cast<int>(i / 2) + 1);
}

TEST_CASE("table1_fixture carries the reference values") {
    Dataset table = table1_fixture();
    CHECK(table.samples[4].sample.v1 == 0.919570);   // class 3, first row
    CHECK(table.samples[10].sample.i1 == 1.671357);  // class 6, first row
    CHECK(table.samples[1].sample.v3 == 2.700700);
    CHECK(table.samples[13].sample.i3 == 0.847664);
}

TEST_CASE("split on table1 at one half takes one test row per class") {
    Dataset table = table1_fixture();
    auto [train, test] = split(table, 0.5, 1);
    CHECK(train.size() == 7);
    CHECK(test.size() == 7);
    std::map<int, int> test_per_class;
    for (const auto& row : test.samples) ++test_per_class[class_code(row.label)];
    for (int code = 1; code <= 7; ++code) CHECK(test_per_class[code] == 1);
}

TEST_CASE("split is deterministic under a fixed seed") {
    Dataset table = table1_fixture();
    auto [train_a, test_a] = split(table, 0.5, 42);
    auto [train_b, test_b] = split(table, 0.5, 42);
    CHECK(row_keys(train_a) == row_keys(train_b));
    CHECK(row_keys(test_a) == row_keys(test_b));
}

TEST_CASE("split partitions the input as multisets") {
    Dataset data;
    for (int i = 0; i < 30; ++i) {
        LabeledSample row;
        row.label = class_from_code(i % 7 + 1);
        row.sample.v1 = i;  // distinct identity per row
        data.samples.push_back(row);
    }
    auto [train, test] = split(data, 0.3, 9);
    CHECK(train.size() + test.size() == data.size());
    auto combined = row_keys(train);
    auto test_keys = row_keys(test);
    combined.insert(combined.end(), test_keys.begin(), test_keys.end());
    auto expected = row_keys(data);
    std::sort(combined.begin(), combined.end());
    std::sort(expected.begin(), expected.end());
    CHECK(combined == expected);
}

TEST_CASE("split counts follow round-half-up per class") {
    Dataset data;
    for (int i = 0; i < 100; ++i) {
        LabeledSample row;
        row.label = FaultClass::Overload;
        row.sample.v1 = i;
        data.samples.push_back(row);
    }
    auto [train, test] = split(data, 0.25, 3);
    CHECK(train.size() == 75);
    CHECK(test.size() == 25);
}

TEST_CASE("split keeps the original row order in both outputs") {
    Dataset data;
    for (int i = 0; i < 40; ++i) {
        LabeledSample row;
        row.label = class_from_code(i % 7 + 1);
        row.sample.v1 = i;
        data.samples.push_back(row);
    }
    auto [train, test] = split(data, 0.4, 5);
    for (std::size_t i = 1; i < train.samples.size(); ++i)
        CHECK(train.samples[i - 1].sample.v1 < train.samples[i].sample.v1);
    for (std::size_t i = 1; i < test.samples.size(); ++i)
        CHECK(test.samples[i - 1].sample.v1 < test.samples[i].sample.v1);
}

TEST_CASE("split never leaves a 2+ sample class without test rows") {
    Dataset data;
    for (int i = 0; i < 2; ++i) {
        LabeledSample row;
        row.label = FaultClass::GroundFault;
        row.sample.v1 = i;
        data.samples.push_back(row);
    }
    auto [train, test] = split(data, 0.1, 0);  // round(0.2) = 0, bumped to 1
    CHECK(test.size() == 1);
    CHECK(train.size() == 1);
}

TEST_CASE("split rejects bad fractions and empty data") {
    Dataset table = table1_fixture();
    CHECK_THROWS_AS(split(table, 0.0, 1), UsageError);
    CHECK_THROWS_AS(split(table, 1.0, 1), UsageError);
    CHECK_THROWS_AS(split(table, -0.2, 1), UsageError);
    CHECK_THROWS_AS(split(Dataset{}, 0.5, 1), UsageError);
}

TEST_CASE("one_hot puts a single 1 at code-1") {
    Vector no_fault = one_hot(FaultClass::NoFault);
    REQUIRE(no_fault.size() == 7);
    CHECK(no_fault[0] == 1.0);
    CHECK(no_fault.sum() == 1.0);

    Vector overvoltage = one_hot(FaultClass::Overvoltage);
    CHECK(overvoltage[6] == 1.0);
    CHECK(overvoltage.sum() == 1.0);

    for (int code = 1; code <= 7; ++code) {
        Vector v = one_hot(class_from_code(code));
        CHECK(v.sum() == 1.0);
        for (int i = 0; i < 7; ++i) CHECK((v[i] == 0.0 || v[i] == 1.0));
    }
}

TEST_CASE("to_input_vector keeps voltages first, currents last") {
    PhaseSample s{10, 20, 30, 40, 50, 60};
    Vector v = to_input_vector(s);
    REQUIRE(v.size() == 6);
    CHECK(v[0] == 10);
    CHECK(v[1] == 20);
    CHECK(v[2] == 30);
    CHECK(v[3] == 40);
    CHECK(v[4] == 50);
    CHECK(v[5] == 60);

    CHECK(to_input_vector(PhaseSample{}).isZero());
}

TEST_CASE("class codes map to names bijectively") {
    CHECK(class_from_code(4) == FaultClass::LockedRotor);
    CHECK(class_name(FaultClass::LockedRotor) == "LockedRotor");
    CHECK(class_display_name(FaultClass::SinglePhasingUnderVoltage) ==
          "Single phasing, under voltage");
    CHECK(class_code(FaultClass::Overvoltage) == 7);
    CHECK_THROWS_AS(class_from_code(0), UsageError);
    CHECK_THROWS_AS(class_from_code(8), UsageError);
}
