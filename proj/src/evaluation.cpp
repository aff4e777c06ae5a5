#include "motorfault/evaluation.hpp"

#include "motorfault/errors.hpp"
#include "motorfault/text.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace motorfault {

void validate(const DecisionRule& rule) {
    if (rule.mode == DecisionMode::Threshold &&
        !(rule.threshold > 0.0 && rule.threshold < 1.0))
        throw UsageError("threshold must lie in (0,1)");
}

std::optional<FaultClass> decide(const Vector& outputs, const DecisionRule& rule) {
    if (outputs.size() != kNumClasses)
        throw DimensionError("decision needs 7 outputs, got " +
                             std::to_string(outputs.size()));
    validate(rule);
    if (rule.mode == DecisionMode::Argmax) {
        // maxCoeff scans in index order, so ties already fall to the lowest code.
        Eigen::Index best;
        outputs.maxCoeff(&best);
        return class_from_code(static_cast<int>(best) + 1);
    }
    for (Eigen::Index i = 0; i < outputs.size(); ++i)
        if (outputs[i] >= rule.threshold)
            return class_from_code(static_cast<int>(i) + 1);
    return std::nullopt;
}

namespace {

double top_margin(const Vector& outputs) {
    if (outputs.size() < 2) return 0.0;
    double top = outputs.maxCoeff();
    double runner = -1.0;
    bool seen_top = false;
    for (Eigen::Index i = 0; i < outputs.size(); ++i) {
        if (!seen_top && outputs[i] == top) {
            seen_top = true;
            continue;
        }
        runner = std::max(runner, outputs[i]);
    }
    return top - runner;
}

}  // namespace

ClassificationResult classify(const Network& net, const PhaseSample& sample,
                              const DecisionRule& rule) {
    ClassificationResult result;
    result.outputs = forward(net, to_input_vector(sample)).back();
    result.predicted = decide(result.outputs, rule);
    result.margin = top_margin(result.outputs);
    return result;
}

EvalResult evaluate(const Network& net, const Dataset& test, const DecisionRule& rule) {
    if (test.empty()) throw UsageError("cannot evaluate an empty dataset");
    EvalResult result;
    for (const LabeledSample& row : test.samples) {
        ClassificationResult c = classify(net, row.sample, rule);
        int true_index = class_code(row.label) - 1;
        if (c.predicted)
            ++result.matrix.counts(true_index, class_code(*c.predicted) - 1);
        else
            ++result.matrix.rejected(true_index);
    }
    result.accuracy = static_cast<double>(result.matrix.trace()) /
                      static_cast<double>(test.size());
    return result;
}

FrequencyReport frequency_report(const ConfusionMatrix& cm) {
    FrequencyReport report;
    for (int c = 0; c < kNumClasses; ++c)
        report.predicted_counts[c] = cm.counts.col(c).sum();
    report.rejected_total = cm.rejected.sum();
    report.total = cm.total();
    return report;
}

std::string render_frequency_report(const FrequencyReport& report) {
    std::ostringstream out;
    out << "Fault" << std::setw(42) << std::right << "Frequency of classification"
        << '\n';
    for (int c = 0; c < kNumClasses; ++c) {
        FaultClass label = class_from_code(c + 1);
        std::string name = std::string(class_display_name(label)) + " (" +
                           std::to_string(c + 1) + ")";
        out << name << std::setw(static_cast<int>(47 - name.size())) << std::right
            << report.predicted_counts[c] << '\n';
    }
    if (report.rejected_total > 0)
        out << "Rejected" << std::setw(39) << std::right << report.rejected_total << '\n';
    out << "Total" << std::setw(42) << std::right << report.total << '\n';
    return out.str();
}

RegressionFit fit_from_points(const std::vector<std::pair<double, double>>& points) {
    RegressionFit fit;
    fit.points = points;
    if (points.empty()) {
        fit.degenerate = true;
        return fit;
    }
    double n = static_cast<double>(points.size());
    double sum_x = 0, sum_y = 0;
    for (const auto& [x, y] : points) {
        sum_x += x;
        sum_y += y;
    }
    double mean_x = sum_x / n;
    double mean_y = sum_y / n;
    double sxx = 0, syy = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        double dx = x - mean_x;
        double dy = y - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        fit.degenerate = true;
        fit.r = 0.0;
        return fit;
    }
    fit.r = sxy / std::sqrt(sxx * syy);
    fit.r = std::clamp(fit.r, -1.0, 1.0);
    return fit;
}

RegressionFit regression_fit(const Network& net, const Dataset& data) {
    if (data.empty()) throw UsageError("cannot fit an empty dataset");
    std::vector<std::pair<double, double>> points;
    points.reserve(data.size() * kNumClasses);
    for (const LabeledSample& row : data.samples) {
        Vector target = one_hot(row.label);
        Vector output = forward(net, to_input_vector(row.sample)).back();
        for (int c = 0; c < kNumClasses; ++c)
            points.emplace_back(target[c], output[c]);
    }
    return fit_from_points(points);
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm) {
    for (int row = 0; row < kNumClasses; ++row) {
        for (int col = 0; col < kNumClasses; ++col) {
            if (col) out << ',';
            out << cm.counts(row, col);
        }
        out << '\n';
    }
}

void write_points_csv(std::ostream& out, const RegressionFit& fit) {
    out << "target,output\n";
    for (const auto& [target, output] : fit.points)
        out << format_double(target) << ',' << format_double(output) << '\n';
}

}  // namespace motorfault
