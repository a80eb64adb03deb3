#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "vanlearn/dataset.hpp"
#include "vanlearn/deadline.hpp"
#include "vanlearn/error.hpp"
#include "vanlearn/ml/gradient_descent.hpp"
#include "vanlearn/ml/standardize.hpp"
#include "vanlearn/tensor.hpp"

namespace vanlearn::ml {

// Binary logistic regression. labels[0] is encoded as 0 and labels[1] as 1;
// labels[0] is always the smaller of the two under cell_less.
struct LogisticModel {
    Vector weights;
    double intercept = 0.0;
    std::array<Cell, 2> labels;
    std::vector<FeatureScale> scaling;
    std::size_t iterations = 0;

    friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

struct LogisticPrediction {
    std::vector<Cell> labels;
    Vector probabilities;  // P(labels[1])
};

inline std::array<Cell, 2> binary_label_map(std::span<const Cell> y) {
    std::vector<Cell> distinct;
    for (const auto& c : y) {
        bool seen = false;
        for (const auto& d : distinct) seen = seen || d == c;
        if (!seen) distinct.push_back(c);
        if (distinct.size() > 2) break;
    }
    if (distinct.size() != 2)
        throw Error(errc::label_cardinality, "logistic regression needs exactly 2 distinct labels, found " +
                                                 (distinct.size() > 2 ? std::string("more") : std::to_string(distinct.size())));
    if (cell_less(distinct[1], distinct[0])) std::swap(distinct[0], distinct[1]);
    return {distinct[0], distinct[1]};
}

inline LogisticModel logreg_fit(const Matrix& x, std::span<const Cell> y, const GdConfig& cfg = {},
                                const LossObserver& observer = {}, const Deadline& deadline = Deadline::none()) {
    if (x.rows() != y.size())
        throw Error(errc::shape, "logreg_fit: X has " + std::to_string(x.rows()) + " rows but there are " +
                                     std::to_string(y.size()) + " labels");
    auto labels = binary_label_map(y);

    std::vector<double> targets(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) targets[i] = y[i] == labels[1] ? 1.0 : 0.0;

    const auto scaling = fit_scaling(x);
    const Matrix z = apply_scaling(x, scaling);
    GdResult res = gradient_descent(
        std::vector<double>(x.cols() + 1, 0.0),
        [&](std::span<const double> p) { return objective::logistic(z, targets, p); }, cfg, observer, deadline);

    std::vector<double> w(res.params.begin(), res.params.end() - 1);
    double b = res.params.back();
    unscale_coefficients(scaling, w, b);
    return LogisticModel{Vector(std::move(w)), b, std::move(labels), scaling, res.iterations};
}

inline LogisticPrediction logreg_predict(const LogisticModel& model, const Matrix& x) {
    if (x.rows() > 0 && x.cols() != model.weights.size())
        throw Error(errc::shape, "logreg_predict: model has " + std::to_string(model.weights.size()) +
                                     " features, input has " + std::to_string(x.cols()));
    LogisticPrediction out;
    std::vector<double> probs(x.rows());
    out.labels.reserve(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        probs[i] = objective::sigmoid(dot(model.weights.values(), x.row(i)) + model.intercept);
        out.labels.push_back(probs[i] >= 0.5 ? model.labels[1] : model.labels[0]);
    }
    out.probabilities = Vector(std::move(probs));
    return out;
}

inline double accuracy(std::span<const Cell> predicted, std::span<const Cell> truth) {
    if (truth.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace vanlearn::ml
