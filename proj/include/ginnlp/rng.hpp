#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace ginnlp {

// Deterministic random stream. mt19937_64 has a standard-mandated output
// sequence, and the derived draws below are fixed formulas, so a given seed
// produces identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in (0, 1]
    double uniform01() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller without caching the second value, so each draw consumes a
    // fixed number of engine states regardless of call pattern.
    double normal(double mean = 0.0, double sigma = 1.0) {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(2.0 * std::numbers::pi * u2);
        return mean + sigma * z;
    }

    // bounded draw in [0, n); modulo bias is irrelevant at our sizes
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    // deterministic Fisher-Yates permutation of 0..n-1
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace ginnlp
