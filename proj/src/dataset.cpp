#include "motorfault/dataset.hpp"

#include "motorfault/errors.hpp"
#include "motorfault/rng.hpp"
#include "motorfault/text.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace motorfault {

FaultClass class_from_code(int code) {
    if (code < 1 || code > kNumClasses)
        throw UsageError("class code " + std::to_string(code) + " out of range 1..7");
    return static_cast<FaultClass>(code);
}

std::string_view class_name(FaultClass label) {
    switch (label) {
        case FaultClass::NoFault: return "NoFault";
        case FaultClass::Overload: return "Overload";
        case FaultClass::GroundFault: return "GroundFault";
        case FaultClass::LockedRotor: return "LockedRotor";
        case FaultClass::UnbalancedVoltage: return "UnbalancedVoltage";
        case FaultClass::SinglePhasingUnderVoltage: return "SinglePhasingUnderVoltage";
        case FaultClass::Overvoltage: return "Overvoltage";
    }
    throw UsageError("invalid fault class");
}

std::string_view class_display_name(FaultClass label) {
    switch (label) {
        case FaultClass::NoFault: return "No fault";
        case FaultClass::Overload: return "Overload";
        case FaultClass::GroundFault: return "Ground fault";
        case FaultClass::LockedRotor: return "Locked rotor";
        case FaultClass::UnbalancedVoltage: return "Unbalanced voltage";
        case FaultClass::SinglePhasingUnderVoltage: return "Single phasing, under voltage";
        case FaultClass::Overvoltage: return "Overvoltage";
    }
    throw UsageError("invalid fault class");
}

namespace {

double parse_field(std::string_view field, std::size_t line_number) {
    double value;
    if (!try_parse_double(field, value) || !std::isfinite(value))
        throw ParseError("bad numeric field '" + std::string(field) + "'", line_number);
    return value;
}

LabeledSample parse_row(std::string_view line, std::size_t line_number) {
    auto fields = split(line, ',');
    if (fields.size() != 7)
        throw ParseError("expected 7 fields, got " + std::to_string(fields.size()),
                         line_number);
    std::int64_t code;
    if (!try_parse_int(fields[0], code))
        throw ParseError("bad class '" + std::string(fields[0]) + "'", line_number);
    if (code < 1 || code > kNumClasses)
        throw ParseError("class " + std::to_string(code) + " out of range 1..7",
                         line_number);
    LabeledSample row;
    row.label = static_cast<FaultClass>(code);
    row.sample.v1 = parse_field(fields[1], line_number);
    row.sample.v2 = parse_field(fields[2], line_number);
    row.sample.v3 = parse_field(fields[3], line_number);
    row.sample.i1 = parse_field(fields[4], line_number);
    row.sample.i2 = parse_field(fields[5], line_number);
    row.sample.i3 = parse_field(fields[6], line_number);
    return row;
}

}  // namespace

Dataset parse_csv(std::string_view text, std::string provenance) {
    Dataset data;
    data.provenance = std::move(provenance);
    std::size_t line_number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find('\n', start);
        std::string_view line = text.substr(
            start, pos == std::string_view::npos ? text.size() - start : pos - start);
        bool last = pos == std::string_view::npos;
        start = last ? text.size() + 1 : pos + 1;
        line = strip_cr(line);
        if (last && line.empty()) break;  // trailing newline
        ++line_number;
        if (line_number == 1) {
            if (line != kCsvHeader)
                throw ParseError("bad header '" + std::string(line) + "', expected '" +
                                     std::string(kCsvHeader) + "'",
                                 1);
            continue;
        }
        data.samples.push_back(parse_row(line, line_number));
    }
    if (line_number == 0) throw ParseError("empty input, expected header", 1);
    return data;
}

Dataset parse_csv(std::istream& in, std::string provenance) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(std::string_view(buffer.view()), std::move(provenance));
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_csv(in, path);
}

void write_csv(std::ostream& out, const Dataset& data) {
    out << kCsvHeader << '\n';
    for (const auto& row : data.samples) {
        const PhaseSample& s = row.sample;
        out << class_code(row.label) << ',' << format_double(s.v1) << ','
            << format_double(s.v2) << ',' << format_double(s.v3) << ','
            << format_double(s.i1) << ',' << format_double(s.i2) << ','
            << format_double(s.i3) << '\n';
    }
}

std::string to_csv(const Dataset& data) {
    std::ostringstream out;
    write_csv(out, data);
    return out.str();
}

void save_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_csv(out, data);
    if (!out.flush()) throw IoError("write failed for '" + path + "'");
}

// Values keep their canonical six-decimal form, trailing zeros included, so
// this text is the byte-exact reference output.
const std::string_view kTable1Csv =
    "class,v1,v2,v3,i1,i2,i3\n"
    "1,2.661025,2.624276,2.701274,0.490768,0.478549,0.493368\n"
    "1,2.660319,2.624661,2.700700,0.491114,0.478722,0.492584\n"
    "2,2.647625,2.598815,2.671626,0.006194,0.643518,0.640217\n"
    "2,2.650816,2.601661,2.673722,0.006123,0.641548,0.638553\n"
    "3,0.919570,2.621412,2.626511,0.172113,0.772419,0.662758\n"
    "3,0.919852,2.621627,2.625342,0.172072,0.772106,0.662653\n"
    "4,1.874796,1.855089,1.874878,0.286777,0.287052,0.281013\n"
    "4,1.452803,1.449902,1.441935,0.245231,0.249739,0.234152\n"
    "5,2.865128,2.871906,2.855436,0.482896,0.499206,0.496894\n"
    "5,2.868791,2.875877,2.860353,0.483453,0.499363,0.496879\n"
    "6,2.657179,2.613409,2.687374,1.671357,1.650515,1.668712\n"
    "6,2.661374,2.613395,2.688907,1.416786,1.397752,1.411372\n"
    "7,2.637658,2.600486,2.673771,0.803147,0.782514,0.797477\n"
    "7,2.650468,2.608143,2.682578,0.857336,0.837601,0.847664\n";

Dataset table1_fixture() { return parse_csv(kTable1Csv, "table1"); }

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                  std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw UsageError("test fraction must lie in (0,1)");
    if (data.empty()) throw UsageError("cannot split an empty dataset");

    // Indices per class, in input order.
    std::vector<std::vector<std::size_t>> by_class(kNumClasses);
    for (std::size_t i = 0; i < data.samples.size(); ++i)
        by_class[class_code(data.samples[i].label) - 1].push_back(i);

    std::vector<bool> in_test(data.samples.size(), false);
    for (int c = 0; c < kNumClasses; ++c) {
        auto& indices = by_class[c];
        if (indices.empty()) continue;
        std::size_t n = indices.size();
        // Round half up; never empty the test side of a class with 2+ samples.
        auto take = static_cast<std::size_t>(
            std::floor(static_cast<double>(n) * test_fraction + 0.5));
        if (take == 0 && n >= 2) take = 1;
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c + 1)));
        rng.shuffle(indices);
        for (std::size_t k = 0; k < take; ++k) in_test[indices[k]] = true;
    }

    Dataset train, test;
    train.provenance = data.provenance.empty() ? "train" : data.provenance + " (train)";
    test.provenance = data.provenance.empty() ? "test" : data.provenance + " (test)";
    for (std::size_t i = 0; i < data.samples.size(); ++i)
        (in_test[i] ? test : train).samples.push_back(data.samples[i]);
    return {std::move(train), std::move(test)};
}

Vector one_hot(FaultClass label) {
    Vector v = Vector::Zero(kNumClasses);
    v[class_code(label) - 1] = 1.0;
    return v;
}

Vector to_input_vector(const PhaseSample& sample) {
    Vector v(kInputDim);
    v << sample.v1, sample.v2, sample.v3, sample.i1, sample.i2, sample.i3;
    return v;
}

}  // namespace motorfault
