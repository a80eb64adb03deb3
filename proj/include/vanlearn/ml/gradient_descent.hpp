#pragma once

// Batch gradient descent shared by the linear and logistic fits.
//
// Parameters are packed as [w_0 .. w_{d-1}, b]. Fixed mode applies a constant
// step. Two-point mode (Barzilai-Borwein) uses step = s.s / s.g' where s is the
// last parameter change and g' the matching gradient change, falling back to
// the configured step whenever that ratio is not positive and finite.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "vanlearn/deadline.hpp"
#include "vanlearn/error.hpp"
#include "vanlearn/tensor.hpp"

namespace vanlearn::ml {

enum class StepMode { fixed, two_point };

struct GdConfig {
    double step_size = 1e-3;
    std::size_t max_iters = 10'000;
    double grad_tol = 1e-6;
    StepMode step_mode = StepMode::fixed;

    void check() const {
        if (!(step_size > 0.0) || max_iters < 1 || !(grad_tol > 0.0))
            throw Error(errc::argument, "GdConfig needs step_size > 0, max_iters >= 1, grad_tol > 0");
    }
};

// Called with (iteration, loss) for the iterate about to be stepped from;
// iteration 0 is the starting point.
using LossObserver = std::function<void(std::size_t, double)>;

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

struct GdResult {
    std::vector<double> params;
    double loss = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

namespace objective {

// Mean squared error over standardized features z with targets y.
inline LossGrad linear(const Matrix& z, std::span<const double> y, std::span<const double> params) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
    LossGrad out{0.0, std::vector<double>(d + 1, 0.0)};
    const double b = params[d];
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = z.row(i);
        const double r = dot(row, params.first(d)) + b - y[i];
        out.loss += r * r;
        for (std::size_t j = 0; j < d; ++j) out.grad[j] += r * row[j];
        out.grad[d] += r;
    }
    const double inv = 1.0 / static_cast<double>(n);
    out.loss *= inv;
    for (double& g : out.grad) g *= 2.0 * inv;
    return out;
}

inline double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// log(1 + e^t) without overflow.
inline double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

// Mean cross-entropy with a sigmoid link; y holds 0/1 targets.
inline LossGrad logistic(const Matrix& z, std::span<const double> y, std::span<const double> params) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
    LossGrad out{0.0, std::vector<double>(d + 1, 0.0)};
    const double b = params[d];
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = z.row(i);
        const double t = dot(row, params.first(d)) + b;
        out.loss += softplus(t) - y[i] * t;
        const double r = sigmoid(t) - y[i];
        for (std::size_t j = 0; j < d; ++j) out.grad[j] += r * row[j];
        out.grad[d] += r;
    }
    const double inv = 1.0 / static_cast<double>(n);
    out.loss *= inv;
    for (double& g : out.grad) g *= inv;
    return out;
}

}  // namespace objective

inline double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

template <typename Objective>
GdResult gradient_descent(std::vector<double> params, Objective&& objective, const GdConfig& cfg,
                          const LossObserver& observer = {}, const Deadline& deadline = Deadline::none()) {
    cfg.check();
    GdResult res;
    std::vector<double> prev_params;
    std::vector<double> prev_grad;

    LossGrad lg = objective(params);
    std::size_t iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        deadline.check();
        if (observer) observer(iter, lg.loss);
        if (l2_norm(lg.grad) < cfg.grad_tol) {
            res.converged = true;
            break;
        }

        double step = cfg.step_size;
        if (cfg.step_mode == StepMode::two_point && !prev_params.empty()) {
            double ss = 0.0;
            double sy = 0.0;
            for (std::size_t k = 0; k < params.size(); ++k) {
                const double s = params[k] - prev_params[k];
                const double yk = lg.grad[k] - prev_grad[k];
                ss += s * s;
                sy += s * yk;
            }
            const double bb = ss / sy;
            if (sy > 0.0 && std::isfinite(bb) && bb > 0.0) step = bb;
        }

        prev_params = params;
        prev_grad = lg.grad;
        for (std::size_t k = 0; k < params.size(); ++k) params[k] -= step * lg.grad[k];
        lg = objective(params);
        if (!std::isfinite(lg.loss))
            throw Error(errc::non_finite, "gradient descent diverged (loss is not finite); reduce step_size");
    }
    if (!res.converged && observer) observer(iter, lg.loss);
    res.params = std::move(params);
    res.loss = lg.loss;
    res.iterations = iter;
    return res;
}

}  // namespace vanlearn::ml
