#pragma once

// Lloyd's algorithm with k-means++ seeding.
//
// Each iteration assigns every point to its nearest centroid (a point keeps
// its current cluster on exact ties), refills empty clusters, then moves each
// centroid to the mean of its members. Iteration stops when assignments stop
// changing, when no centroid moves by tol or more, or after max_iters.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "vanlearn/deadline.hpp"
#include "vanlearn/error.hpp"
#include "vanlearn/tensor.hpp"

namespace vanlearn::ml {

struct KMeansConfig {
    std::size_t k = 1;
    std::size_t max_iters = 300;
    std::uint64_t seed = 0;
    double tol = 1e-6;

    void check() const {
        if (k < 1 || max_iters < 1 || !(tol > 0.0))
            throw Error(errc::argument, "KMeansConfig needs k >= 1, max_iters >= 1, tol > 0");
    }
};

struct KMeansModel {
    Matrix centroids;  // k x d
    std::vector<std::size_t> assignments;
    double inertia = 0.0;
    std::size_t iterations_run = 0;

    friend bool operator==(const KMeansModel&, const KMeansModel&) = default;
};

// Called once per iteration with the inertia after the centroid update.
using InertiaObserver = std::function<void(std::size_t, double)>;

namespace detail {

inline std::vector<double> kmeanspp_seed(const Matrix& data, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    std::vector<double> centroids;
    centroids.reserve(k * d);

    auto take = [&](std::size_t i) {
        const auto r = data.row(i);
        centroids.insert(centroids.end(), r.begin(), r.end());
    };

    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    take(pick(rng));

    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    for (std::size_t c = 1; c < k; ++c) {
        const std::span<const double> last(centroids.data() + (c - 1) * d, d);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            best[i] = std::min(best[i], squared_distance(data.row(i), last));
            total += best[i];
        }
        if (!(total > 0.0)) {
            // Every point coincides with a chosen centroid.
            take(pick(rng));
            continue;
        }
        std::uniform_real_distribution<double> u(0.0, total);
        const double target = u(rng);
        double acc = 0.0;
        std::size_t chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            acc += best[i];
            if (acc > target && best[i] > 0.0) {
                chosen = i;
                break;
            }
        }
        take(chosen);
    }
    return centroids;
}

}  // namespace detail

inline KMeansModel kmeans_fit(const Matrix& data, const KMeansConfig& cfg, const InertiaObserver& observer = {},
                              const Deadline& deadline = Deadline::none()) {
    cfg.check();
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    const std::size_t k = cfg.k;
    if (n < k)
        throw Error(errc::too_few_rows, "k-means with k=" + std::to_string(k) + " needs at least " +
                                            std::to_string(k) + " rows, got " + std::to_string(n));
    if (d < 1) throw Error(errc::shape, "k-means needs at least one feature column");

    std::mt19937_64 rng(cfg.seed);
    std::vector<double> centroids = detail::kmeanspp_seed(data, k, rng);
    auto centroid = [&](std::size_t c) { return std::span<const double>(centroids.data() + c * d, d); };

    std::vector<std::size_t> assign(n, 0);
    std::vector<std::size_t> sizes(k, 0);
    std::vector<double> dist(n, 0.0);
    std::size_t iter = 0;

    auto inertia_of = [&] {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += squared_distance(data.row(i), centroid(assign[i]));
        return total;
    };

    while (iter < cfg.max_iters) {
        deadline.check();
        ++iter;

        bool changed = false;
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = data.row(i);
            std::size_t best_c = iter == 1 ? 0 : assign[i];
            double best_d = squared_distance(x, centroid(best_c));
            for (std::size_t c = 0; c < k; ++c) {
                const double dc = squared_distance(x, centroid(c));
                if (dc < best_d) {
                    best_d = dc;
                    best_c = c;
                }
            }
            changed = changed || iter == 1 || best_c != assign[i];
            assign[i] = best_c;
            dist[i] = best_d;
            ++sizes[best_c];
        }

        // Refill each empty cluster with the point farthest from its centroid,
        // drawn from a cluster that can spare it.
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[assign[i]] < 2) continue;
                if (far == n || dist[i] > dist[far]) far = i;
            }
            --sizes[assign[far]];
            assign[far] = c;
            sizes[c] = 1;
            dist[far] = 0.0;
            std::copy(data.row(far).begin(), data.row(far).end(), centroids.begin() + static_cast<std::ptrdiff_t>(c * d));
            changed = true;
        }

        if (!changed) break;

        std::vector<double> next(k * d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = data.row(i);
            for (std::size_t j = 0; j < d; ++j) next[assign[i] * d + j] += x[j];
        }
        double max_shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < d; ++j) next[c * d + j] /= static_cast<double>(sizes[c]);
            max_shift = std::max(max_shift, std::sqrt(squared_distance(centroid(c), {next.data() + c * d, d})));
        }
        centroids = std::move(next);

        if (observer) observer(iter, inertia_of());
        if (max_shift < cfg.tol) break;
    }

    KMeansModel model;
    model.inertia = inertia_of();
    model.centroids = Matrix(k, d, std::move(centroids));
    model.assignments = std::move(assign);
    model.iterations_run = iter;
    return model;
}

// Index of the nearest centroid for each row (lowest index on ties).
inline std::vector<std::size_t> kmeans_assign(const KMeansModel& model, const Matrix& data) {
    if (data.rows() > 0 && data.cols() != model.centroids.cols())
        throw Error(errc::shape, "kmeans_assign: width mismatch");
    std::vector<std::size_t> out(data.rows(), 0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < model.centroids.rows(); ++c) {
            const double dc = squared_distance(data.row(i), model.centroids.row(c));
            if (dc < best) {
                best = dc;
                out[i] = c;
            }
        }
    }
    return out;
}

}  // namespace vanlearn::ml
