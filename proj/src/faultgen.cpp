#include "motorfault/faultgen.hpp"

#include "motorfault/errors.hpp"
#include "motorfault/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace motorfault {

void validate(const GeneratorSpec& spec) {
    if (spec.signatures.size() != kNumClasses)
        throw UsageError("expected exactly 7 class signatures, got " +
                         std::to_string(spec.signatures.size()));
    std::array<int, kNumClasses> seen{};
    for (const ClassSignature& sig : spec.signatures) {
        int code = class_code(sig.label);
        if (code < 1 || code > kNumClasses || seen[code - 1]++)
            throw UsageError("signatures must cover each class exactly once");
        if (sig.centroid.size() != kInputDim || sig.sigma.size() != kInputDim)
            throw UsageError("signature vectors must have 6 entries");
        if ((sig.centroid.array() < 0).any() || (sig.sigma.array() < 0).any())
            throw UsageError("signature entries must be non-negative");
    }
    for (std::int64_t count : spec.counts)
        if (count < 0) throw UsageError("per-class counts must be non-negative");
}

std::vector<ClassSignature> default_signatures(double relative_noise) {
    if (relative_noise < 0) throw UsageError("relative noise must be non-negative");
    Dataset table = table1_fixture();
    std::vector<ClassSignature> signatures;
    for (int code = 1; code <= kNumClasses; ++code) {
        Vector sum = Vector::Zero(kInputDim);
        int n = 0;
        for (const LabeledSample& row : table.samples) {
            if (class_code(row.label) != code) continue;
            sum += to_input_vector(row.sample);
            ++n;
        }
        ClassSignature sig;
        sig.label = class_from_code(code);
        sig.centroid = sum / n;
        sig.sigma = relative_noise * sig.centroid;
        signatures.push_back(std::move(sig));
    }
    return signatures;
}

Dataset generate(const GeneratorSpec& spec) {
    validate(spec);
    Dataset data;
    {
        std::ostringstream tag;
        std::int64_t total = std::accumulate(spec.counts.begin(), spec.counts.end(),
                                             std::int64_t{0});
        tag << "generated(seed=" << spec.seed << ", n=" << total << ")";
        data.provenance = tag.str();
    }
    for (int code = 1; code <= kNumClasses; ++code) {
        auto sig = std::find_if(spec.signatures.begin(), spec.signatures.end(),
                                [code](const ClassSignature& s) {
                                    return class_code(s.label) == code;
                                });
        // One generator per class, so adding samples to one class never
        // shifts another class's draws.
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(code)));
        for (std::int64_t k = 0; k < spec.counts[code - 1]; ++k) {
            Vector values(kInputDim);
            for (int ch = 0; ch < kInputDim; ++ch) {
                double value = rng.gaussian(sig->centroid[ch], sig->sigma[ch]);
                if (spec.clamp_negative && value < 0) value = 0;
                values[ch] = value;
            }
            LabeledSample row;
            row.label = sig->label;
            row.sample = {values[0], values[1], values[2], values[3], values[4], values[5]};
            data.samples.push_back(row);
        }
    }
    return data;
}

std::pair<Dataset, Dataset> generate_paper_scale(std::uint64_t seed,
                                                 double relative_noise) {
    GeneratorSpec spec;
    spec.signatures = default_signatures(relative_noise);
    spec.clamp_negative = true;

    spec.counts = kPaperScaleTrainCounts;
    spec.seed = derive_seed(seed, 101);
    Dataset train = generate(spec);

    spec.counts = kPaperScaleTestCounts;
    spec.seed = derive_seed(seed, 202);
    Dataset test = generate(spec);

    return {std::move(train), std::move(test)};
}

}  // namespace motorfault
