#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace motorfault {

// Deterministic random source. std::mt19937_64 has a bit-stream pinned by the
// standard, but the standard distributions and std::shuffle do not, so every
// mapping from raw 64-bit draws to doubles, bounded integers, and permutations
// is spelled out here. Same seed, same sequence of calls, same results on any
// conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform on [0,1) with 53-bit resolution: top 53 bits of one draw.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform on [lo,hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Standard normal deviate via the Box-Muller transform. Consumes exactly
    // two draws; the second deviate of the pair is discarded so the stream
    // position never depends on call history. u1 lies in (0,1] so log(u1) is
    // finite.
    double gaussian();

    double gaussian(double mean, double stddev) {
        return mean + stddev * gaussian();
    }

    // Uniform integer on [0,n), n >= 1. Rejection over the top multiple of n
    // keeps the result exactly uniform.
    std::uint64_t below(std::uint64_t n);

    // Fisher-Yates, back to front.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Mixes a user seed with a stream index so independent consumers of one seed
// get decorrelated engines. splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace motorfault
