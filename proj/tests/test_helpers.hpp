#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// here deliberately avoid the library's closed-form code paths.

#include <random>

#include "liefloq/lie_core.hpp"

namespace testutil {

using namespace liefloq;

/// Independent matrix-exponential oracle: scale until the norm is small,
/// run a 30-term Taylor series, square back up.
inline Mat series_exp(const Mat& x) {
    double norm = x.frobenius_norm();
    int squarings = 0;
    Mat xs = x;
    while (norm > 0.25 && squarings < 60) {
        xs = xs * 0.5;
        norm *= 0.5;
        ++squarings;
    }
    Mat acc = Mat::identity(x.dim());
    Mat term = Mat::identity(x.dim());
    for (int n = 1; n <= 30; ++n) {
        term = term * xs * (1.0 / n);
        acc += term;
    }
    for (int i = 0; i < squarings; ++i) acc = acc * acc;
    return acc;
}

inline std::mt19937& rng() {
    static std::mt19937 gen(0xf10c4e7u);
    return gen;
}

inline double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng());
}

inline Vec3 random_vec(double scale = 1.0) {
    return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
}

inline AlgebraElement random_algebra(GroupId g, double scale = 1.0) {
    return AlgebraElement(g, random_vec(scale));
}

inline GroupElement random_group(GroupId g, double scale = 1.0) {
    return exp_group(random_algebra(g, scale));
}

inline CoalgebraElement random_coalgebra(GroupId g, double scale = 1.0) {
    return CoalgebraElement(g, random_vec(scale));
}

}  // namespace testutil
