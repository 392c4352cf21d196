#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "liefloq/errors.hpp"

namespace liefloq {

/// Row-major (rows x cols) grid of values; rows index the family parameter,
/// columns index time.
template <class T>
class Grid2D {
  public:
    Grid2D() = default;
    Grid2D(std::size_t rows, std::size_t cols, const T& fill = T())
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& data() const { return data_; }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

namespace stencil {

// Fourth-order five-point first-derivative weights (units of 1/h).
// `offset` is the position of the evaluation node within the five-point
// window: 0 = fully forward, 2 = centered, 4 = fully backward.
inline const double* five_point_weights(int offset) {
    static const double w[5][5] = {
        {-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -1.0 / 4.0},
        {-1.0 / 4.0, -5.0 / 6.0, 3.0 / 2.0, -1.0 / 2.0, 1.0 / 12.0},
        {1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0},
        {-1.0 / 12.0, 1.0 / 2.0, -3.0 / 2.0, 5.0 / 6.0, 1.0 / 4.0},
        {1.0 / 4.0, -4.0 / 3.0, 3.0, -4.0, 25.0 / 12.0},
    };
    return w[offset];
}

/// Derivative of a sampled function at node `i` of an `n`-node grid with
/// spacing `h`, fourth order. `fetch(j)` returns the sample at node j.
/// For periodic grids the last node must duplicate the first
/// (fetch(0) == fetch(n-1)) and indices wrap; otherwise one-sided windows
/// are used near the edges.
template <class T, class Fetch>
T derivative(Fetch&& fetch, std::size_t n, double h, std::size_t i, bool periodic) {
    if (n < 5) throw ResolutionError("derivative stencil needs at least 5 nodes");
    long base;
    int offset;
    if (periodic) {
        base = static_cast<long>(i) - 2;
        offset = 2;
    } else {
        if (i < 2) {
            base = 0;
            offset = static_cast<int>(i);
        } else if (i + 2 >= n) {
            base = static_cast<long>(n) - 5;
            offset = static_cast<int>(i - (n - 5));
        } else {
            base = static_cast<long>(i) - 2;
            offset = 2;
        }
    }
    const double* w = five_point_weights(offset);
    const long period = static_cast<long>(n) - 1;  // duplicated endpoint
    auto node = [&](int k) {
        long j = base + k;
        if (periodic) {
            j %= period;
            if (j < 0) j += period;
        }
        return static_cast<std::size_t>(j);
    };
    T acc = fetch(node(0)) * (w[0] / h);
    for (int k = 1; k < 5; ++k) acc += fetch(node(k)) * (w[k] / h);
    return acc;
}

}  // namespace stencil

namespace quadrature {

/// Composite Simpson weights for `n` equal intervals (n+1 nodes), premultiplied
/// by the step h. Odd interval counts close with a 3/8 block, keeping fourth
/// order throughout.
inline std::vector<double> simpson_weights(std::size_t n, double h) {
    if (n < 2) throw ResolutionError("Simpson quadrature needs at least 2 intervals");
    std::vector<double> w(n + 1, 0.0);
    std::size_t m = n;
    if (n % 2 != 0) {
        if (n < 3) throw ResolutionError("odd Simpson rule needs at least 3 intervals");
        m = n - 3;  // trailing 3/8 block over the last three intervals
        w[m] += 3.0 * h / 8.0;
        w[m + 1] += 9.0 * h / 8.0;
        w[m + 2] += 9.0 * h / 8.0;
        w[m + 3] += 3.0 * h / 8.0;
    }
    if (m > 0) {
        w[0] += h / 3.0;
        w[m] += h / 3.0;
        for (std::size_t i = 1; i < m; ++i) w[i] += (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
    }
    return w;
}

/// Simpson integral of sampled values f(0..n) over n intervals of width h.
template <class T>
T simpson(const std::vector<T>& f, double h) {
    const auto w = simpson_weights(f.size() - 1, h);
    T acc = f[0] * w[0];
    for (std::size_t i = 1; i < f.size(); ++i) acc += f[i] * w[i];
    return acc;
}

}  // namespace quadrature

/// Reduce t into [0, period). Exact for t that is an exact multiple of a
/// dyadic fraction of the period, which is how all grid node times are built.
inline double wrap_periodic(double t, double period) {
    double u = std::remainder(t, period);
    if (u < 0.0) u += period;
    if (u >= period) u -= period;
    return u;
}

}  // namespace liefloq
