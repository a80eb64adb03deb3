#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "vanlearn/codec/csv.hpp"
#include "vanlearn/ml/kmeans.hpp"

using namespace vanlearn;
using namespace vanlearn::ml;

namespace {

Matrix random_points(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::vector<double> v(n * d);
    for (double& x : v) x = u(rng);
    return Matrix(n, d, std::move(v));
}

oracle::Rows rows_of(const Matrix& m) {
    oracle::Rows r;
    for (std::size_t i = 0; i < m.rows(); ++i) r.emplace_back(m.row(i).begin(), m.row(i).end());
    return r;
}

}  // namespace

TEST(KMeans, SingleClusterIsColumnMean) {
    std::mt19937_64 rng(1);
    const Matrix x = random_points(rng, 37, 3);
    const KMeansModel m = kmeans_fit(x, {1});
    const Vector mean = column_means(x);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m.centroids(0, j), mean[j]);
    double total_var_n = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) total_var_n += squared_distance(x.row(i), mean.values());
    EXPECT_NEAR(m.inertia, total_var_n, 1e-9 * total_var_n);
}

TEST(KMeans, FourPointExampleMatchesExhaustiveOptimum) {
    const Matrix x = matrix_from_rows({{0, 0}, {0, 1}, {10, 10}, {10, 11}});
    const double optimum = oracle::exhaustive_two_means(rows_of(x));
    ASSERT_DOUBLE_EQ(optimum, 1.0);

    const KMeansModel m = kmeans_fit(x, {2});
    EXPECT_DOUBLE_EQ(m.inertia, 1.0);
    std::vector<std::vector<double>> cs = rows_of(m.centroids);
    std::sort(cs.begin(), cs.end());
    EXPECT_EQ(cs, (std::vector<std::vector<double>>{{0, 0.5}, {10, 10.5}}));
}

TEST(KMeans, TooFewRows) {
    try {
        kmeans_fit(matrix_from_rows({{1}, {2}}), {3});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "E_TOO_FEW_ROWS");
    }
}

TEST(KMeans, InvariantsOnRandomData) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 5 + rng() % 60, d = 1 + rng() % 4, k = 1 + rng() % 5;
        const Matrix x = random_points(rng, n, d);
        std::vector<double> history;
        const KMeansModel m = kmeans_fit(x, {k, 300, rng()}, [&](std::size_t, double in) { history.push_back(in); });

        for (std::size_t t = 1; t < history.size(); ++t) EXPECT_LE(history[t], history[t - 1]);

        ASSERT_EQ(m.assignments.size(), n);
        double inertia = 0.0;
        std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ASSERT_LT(m.assignments[i], k);
            inertia += squared_distance(x.row(i), m.centroids.row(m.assignments[i]));
            ++counts[m.assignments[i]];
            for (std::size_t j = 0; j < d; ++j) sums[m.assignments[i]][j] += x(i, j);
        }
        EXPECT_NEAR(m.inertia, inertia, 1e-9 * (1.0 + inertia));
        for (std::size_t c = 0; c < k; ++c) {
            EXPECT_GE(counts[c], 1u) << "empty cluster survived";
            for (std::size_t j = 0; j < d && counts[c] > 0; ++j)
                EXPECT_NEAR(m.centroids(c, j), sums[c][j] / static_cast<double>(counts[c]), 1e-9);
        }
    }
}

TEST(KMeans, DeterministicForFixedSeed) {
    std::mt19937_64 rng(8);
    const Matrix x = random_points(rng, 80, 3);
    EXPECT_EQ(kmeans_fit(x, {4, 300, 17}), kmeans_fit(x, {4, 300, 17}));
}

TEST(KMeans, DuplicatePointsFillEveryCluster) {
    const Matrix x = matrix_from_rows({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {5, 5}});
    const KMeansModel m = kmeans_fit(x, {3});
    std::vector<std::size_t> counts(3, 0);
    for (auto a : m.assignments) ++counts[a];
    for (auto c : counts) EXPECT_GE(c, 1u);
}

TEST(KMeans, TimesOutOnExpiredDeadline) {
    std::mt19937_64 rng(8);
    const Matrix x = random_points(rng, 50, 2);
    try {
        kmeans_fit(x, {3}, {}, Deadline(Deadline::clock::now() - std::chrono::seconds(1)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "E_TIMEOUT");
    }
}

TEST(KMeans, AssignMatchesFitAssignments) {
    std::mt19937_64 rng(12);
    const Matrix x = random_points(rng, 60, 2);
    const KMeansModel m = kmeans_fit(x, {3});
    // After convergence every point sits with its nearest centroid.
    EXPECT_EQ(kmeans_assign(m, x), m.assignments);
}
