#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vanlearn/deadline.hpp"
#include "vanlearn/error.hpp"
#include "vanlearn/ml/gradient_descent.hpp"
#include "vanlearn/ml/standardize.hpp"
#include "vanlearn/tensor.hpp"

namespace vanlearn::ml {

struct LinearModel {
    Vector weights;  // raw feature space
    double intercept = 0.0;
    std::vector<FeatureScale> scaling;
    std::size_t iterations = 0;

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

namespace detail {
inline bool all_rows_identical(const Matrix& x) {
    for (std::size_t i = 1; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
            if (x(i, j) != x(0, j)) return false;
    return true;
}
}  // namespace detail

// Least squares by gradient descent on standardized features; the returned
// coefficients are mapped back to the raw feature scale.
inline LinearModel linreg_fit(const Matrix& x, const Vector& y, const GdConfig& cfg = {},
                              const LossObserver& observer = {}, const Deadline& deadline = Deadline::none()) {
    if (x.rows() != y.size())
        throw Error(errc::shape, "linreg_fit: X has " + std::to_string(x.rows()) + " rows but y has " +
                                     std::to_string(y.size()) + " values");
    if (x.rows() < 2) throw Error(errc::too_few_rows, "linreg_fit needs at least 2 rows");
    if (detail::all_rows_identical(x))
        throw Error(errc::degenerate, "linreg_fit: every row has identical features");

    const auto scaling = fit_scaling(x);
    const Matrix z = apply_scaling(x, scaling);
    const auto targets = y.values();

    GdResult res = gradient_descent(
        std::vector<double>(x.cols() + 1, 0.0),
        [&](std::span<const double> p) { return objective::linear(z, targets, p); }, cfg, observer, deadline);

    std::vector<double> w(res.params.begin(), res.params.end() - 1);
    double b = res.params.back();
    unscale_coefficients(scaling, w, b);
    return LinearModel{Vector(std::move(w)), b, scaling, res.iterations};
}

inline Vector linreg_predict(const LinearModel& model, const Matrix& x) {
    if (x.rows() > 0 && x.cols() != model.weights.size())
        throw Error(errc::shape, "linreg_predict: model has " + std::to_string(model.weights.size()) +
                                     " features, input has " + std::to_string(x.cols()));
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = dot(model.weights.values(), x.row(i)) + model.intercept;
    return Vector(std::move(out));
}

}  // namespace vanlearn::ml
