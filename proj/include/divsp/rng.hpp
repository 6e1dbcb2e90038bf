#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "divsp/errors.hpp"

namespace divsp {

// Deterministic random source. mt19937_64 has a fully specified bit stream,
// and all derived draws below avoid the implementation-defined std
// distributions, so traces are reproducible across compilers and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of randomness.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [lo, hi], both inclusive. Unbiased via rejection.
    int uniform_int(int lo, int hi) {
        if (lo > hi) throw PreconditionError("uniform_int: empty range");
        const std::uint64_t n = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return lo + static_cast<int>(r % n);
    }

    // Categorical draw from a (normalized) probability vector.
    int categorical(std::span<const double> probs) {
        if (probs.empty()) throw PreconditionError("categorical: empty distribution");
        const double u = uniform();
        double cum = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            cum += probs[i];
            if (u < cum) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size() - 1);
    }

    // Derive an independent stream; advances this generator by one draw.
    Rng fork() { return Rng(next_u64()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace divsp
