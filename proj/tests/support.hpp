#pragma once

#include <cmath>
#include <random>

namespace testsupport {

inline double rel_err(double got, double want) {
    const double d = std::abs(got - want);
    return want == 0.0 ? d : d / std::abs(want);
}

// Fixed-seed generator for property tests; each test owns its own stream.
inline std::mt19937_64 rng(unsigned long long seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline int uniform_int(std::mt19937_64& g, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(g);
}

} // namespace testsupport
