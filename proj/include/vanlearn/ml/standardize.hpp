#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vanlearn/tensor.hpp"

namespace vanlearn::ml {

// Per-feature (mean, population stddev). A feature whose spread is zero is
// flagged constant; its standardized value is 0 everywhere so the optimizer
// leaves its weight at 0.
struct FeatureScale {
    double mean = 0.0;
    double stddev = 1.0;
    bool constant = false;

    friend bool operator==(const FeatureScale&, const FeatureScale&) = default;
};

inline std::vector<FeatureScale> fit_scaling(const Matrix& x) {
    const std::size_t n = x.rows();
    std::vector<FeatureScale> out(x.cols());
    if (n == 0) return out;
    const Vector means = column_means(x);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x(i, j) - means[j];
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        out[j].mean = means[j];
        // Spread at rounding-noise level relative to the magnitude counts as constant.
        if (!(sd > 1e-12 * std::max(1.0, std::abs(means[j])))) {
            out[j].stddev = 1.0;
            out[j].constant = true;
        } else {
            out[j].stddev = sd;
        }
    }
    return out;
}

inline Matrix apply_scaling(const Matrix& x, const std::vector<FeatureScale>& scale) {
    std::vector<double> z(x.rows() * x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
            z[i * x.cols() + j] = scale[j].constant ? 0.0 : (x(i, j) - scale[j].mean) / scale[j].stddev;
    return Matrix(x.rows(), x.cols(), std::move(z));
}

// Maps standardized-space (w, b) back to raw feature space.
inline void unscale_coefficients(const std::vector<FeatureScale>& scale, std::vector<double>& weights,
                                 double& intercept) {
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (scale[j].constant) {
            weights[j] = 0.0;
            continue;
        }
        weights[j] /= scale[j].stddev;
        intercept -= weights[j] * scale[j].mean;
    }
}

}  // namespace vanlearn::ml
