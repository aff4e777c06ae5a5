#pragma once

#include "motorfault/dataset.hpp"
#include "motorfault/neuralnet.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace motorfault {

enum class DecisionMode { Argmax, Threshold };

// Argmax: highest activation wins, ties broken toward the lowest class code.
// Threshold: classes are scanned in code order and the first activation >=
// threshold wins; none qualifying means rejection.
struct DecisionRule {
    DecisionMode mode = DecisionMode::Argmax;
    double threshold = 0.5;
};

// Throws UsageError unless threshold lies in (0,1).
void validate(const DecisionRule& rule);

// Applies a rule to a 7-way activation vector. nullopt = rejected (Threshold
// mode only).
std::optional<FaultClass> decide(const Vector& outputs, const DecisionRule& rule);

struct ClassificationResult {
    std::optional<FaultClass> predicted;  // nullopt = rejected
    Vector outputs;                       // 7 activations
    double margin = 0;                    // top activation minus runner-up
};

ClassificationResult classify(const Network& net, const PhaseSample& sample,
                              const DecisionRule& rule);

// rows = true class, columns = predicted class, both 0-based for codes 1..7;
// `rejected` counts per true class (Threshold mode only).
struct ConfusionMatrix {
    Eigen::Matrix<std::int64_t, kNumClasses, kNumClasses> counts;
    Eigen::Matrix<std::int64_t, kNumClasses, 1> rejected;

    ConfusionMatrix() {
        counts.setZero();
        rejected.setZero();
    }

    std::int64_t trace() const { return counts.trace(); }
    std::int64_t total() const { return counts.sum() + rejected.sum(); }
};

struct EvalResult {
    ConfusionMatrix matrix;
    double accuracy = 0;  // trace / |test|, rejections count as misses
};

// Throws UsageError on an empty test set.
EvalResult evaluate(const Network& net, const Dataset& test,
                    const DecisionRule& rule);

// Column sums of the confusion matrix in class-code order, plus rejections
// and the grand total (= test set size).
struct FrequencyReport {
    std::array<std::int64_t, kNumClasses> predicted_counts{};
    std::int64_t rejected_total = 0;
    std::int64_t total = 0;
};

FrequencyReport frequency_report(const ConfusionMatrix& cm);

// Two-column text table: fault name with code, then frequency.
std::string render_frequency_report(const FrequencyReport& report);

// All (one-hot target component, output component) pairs for a dataset, with
// the Pearson correlation over them. `degenerate` marks zero variance on
// either axis, which forces r = 0.
struct RegressionFit {
    std::vector<std::pair<double, double>> points;  // (target, output)
    double r = 0;
    bool degenerate = false;
};

RegressionFit fit_from_points(const std::vector<std::pair<double, double>>& points);

// Throws UsageError on an empty dataset.
RegressionFit regression_fit(const Network& net, const Dataset& data);

// CSV emissions: 7 rows of 7 counts; `target,output` header plus one point
// per row.
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm);
void write_points_csv(std::ostream& out, const RegressionFit& fit);

}  // namespace motorfault
