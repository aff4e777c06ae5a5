#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace motorfault {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kInputDim = 6;
inline constexpr int kNumClasses = 7;

// One six-channel measurement: three phase voltages, three phase currents,
// in scaled sensor units.
struct PhaseSample {
    double v1 = 0, v2 = 0, v3 = 0;
    double i1 = 0, i2 = 0, i3 = 0;
};

// Seven-way fault taxonomy; codes 1..7 are the external labels.
enum class FaultClass : int {
    NoFault = 1,
    Overload = 2,
    GroundFault = 3,
    LockedRotor = 4,
    UnbalancedVoltage = 5,
    SinglePhasingUnderVoltage = 6,
    Overvoltage = 7,
};

constexpr int class_code(FaultClass label) { return static_cast<int>(label); }

// Throws UsageError unless code is 1..7.
FaultClass class_from_code(int code);

// Identifier-style name, e.g. "LockedRotor".
std::string_view class_name(FaultClass label);

// Report-style name, e.g. "Locked rotor".
std::string_view class_display_name(FaultClass label);

struct LabeledSample {
    PhaseSample sample;
    FaultClass label = FaultClass::NoFault;
};

// Order-stable list of labeled samples. `provenance` records where the data
// came from (file path, "table1", or a generator summary).
struct Dataset {
    std::vector<LabeledSample> samples;
    std::string provenance;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

inline constexpr std::string_view kCsvHeader = "class,v1,v2,v3,i1,i2,i3";

// CSV ingestion. First line must be kCsvHeader exactly (optionally CR-LF
// terminated); each data row is `class,v1,v2,v3,i1,i2,i3` with class 1..7.
// Throws ParseError carrying the 1-based line number.
Dataset parse_csv(std::string_view text, std::string provenance = {});
Dataset parse_csv(std::istream& in, std::string provenance = {});

// File variants; throw IoError when the file cannot be opened or written.
Dataset load_csv(const std::string& path);
void save_csv(const std::string& path, const Dataset& data);

void write_csv(std::ostream& out, const Dataset& data);
std::string to_csv(const Dataset& data);

// The embedded 14-row reference table, two rows per class, in canonical
// form: six decimals per value, trailing zeros kept. The CLI prints this
// text verbatim; parse_csv(kTable1Csv) defines the fixture.
extern const std::string_view kTable1Csv;
Dataset table1_fixture();

// Stratified split. Per class c with n_c samples, round(n_c * test_fraction)
// (half up) go to test, at least 1 when n_c >= 2; membership is chosen by a
// seeded per-class shuffle and both outputs keep the input's original order.
// Throws UsageError when the fraction is outside (0,1) or data is empty.
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                  std::uint64_t seed);

// Target vector: 1.0 at index code-1, 0.0 elsewhere.
Vector one_hot(FaultClass label);

// [v1, v2, v3, i1, i2, i3] in that fixed order.
Vector to_input_vector(const PhaseSample& sample);

}  // namespace motorfault
