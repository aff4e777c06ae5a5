#pragma once

#include "motorfault/dataset.hpp"

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace motorfault {

// Per-class generating distribution: mean vector and per-channel standard
// deviations, both in sensor units, both non-negative.
struct ClassSignature {
    FaultClass label = FaultClass::NoFault;
    Vector centroid;  // 6
    Vector sigma;     // 6
};

struct GeneratorSpec {
    std::vector<ClassSignature> signatures;      // exactly 7, one per class
    std::array<std::int64_t, kNumClasses> counts{};  // indexed by code-1
    std::uint64_t seed = 0;
    bool clamp_negative = true;
};

// Throws UsageError unless signatures cover each class exactly once with
// 6-entry non-negative centroid/sigma and counts are non-negative.
void validate(const GeneratorSpec& spec);

// One signature per class: centroid = mean of that class's two embedded
// reference rows, sigma = relative_noise * centroid elementwise.
std::vector<ClassSignature> default_signatures(double relative_noise = 0.01);

// counts[c] samples per class, drawn as centroid + N(0, diag(sigma^2)) from
// Rng(derive_seed(seed, code)), clamped at 0 when clamp_negative, emitted
// grouped by class in code order. Deterministic per spec.
Dataset generate(const GeneratorSpec& spec);

// Train and test counts used by the paper-scale benchmark layout.
inline constexpr std::array<std::int64_t, kNumClasses> kPaperScaleTrainCounts = {
    115, 115, 114, 114, 114, 114, 114};  // sums to 800
inline constexpr std::array<std::int64_t, kNumClasses> kPaperScaleTestCounts = {
    11, 12, 15, 17, 3, 3, 5};  // sums to 66

// Benchmark convenience: 800 training samples split near-evenly (first two
// classes get the extra sample) and a test set with the pinned per-class
// frequencies, drawn from independent sub-seeds of `seed`.
std::pair<Dataset, Dataset> generate_paper_scale(std::uint64_t seed,
                                                 double relative_noise = 0.01);

}  // namespace motorfault
