#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "vanlearn/codec/csv.hpp"
#include "vanlearn/ml/linear.hpp"
#include "vanlearn/ml/logistic.hpp"

using namespace vanlearn;
using namespace vanlearn::ml;

namespace {

struct Problem {
    Matrix x;
    Vector y;
    oracle::Rows rows;
    std::vector<double> targets;
};

// Well-conditioned random least-squares problem: independent uniform
// features, known coefficients, small Gaussian noise.
Problem random_problem(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::uniform_real_distribution<double> feat(-3.0, 3.0);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::normal_distribution<double> noise(0.0, 0.3);
    std::vector<double> w(d);
    for (double& c : w) c = coef(rng);
    const double b = coef(rng);
    Problem p;
    std::vector<double> flat;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(d);
        double yi = b;
        for (std::size_t j = 0; j < d; ++j) {
            row[j] = feat(rng);
            yi += w[j] * row[j];
        }
        flat.insert(flat.end(), row.begin(), row.end());
        p.rows.push_back(row);
        p.targets.push_back(yi + noise(rng));
    }
    p.x = Matrix(n, d, flat);
    p.y = Vector(p.targets);
    return p;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename F>
std::string error_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "<no error>";
}

}  // namespace

TEST(Linreg, NoiselessLine) {
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    for (int i = 0; i < 10; ++i) {
        xs.push_back({static_cast<double>(i)});
        ys.push_back(2.0 * i + 1.0);
    }
    const LinearModel m = linreg_fit(matrix_from_rows(xs), Vector(ys));
    EXPECT_NEAR(m.weights[0], 2.0, 1e-3);
    EXPECT_NEAR(m.intercept, 1.0, 1e-3);
    // Extrapolation to x = 20 from the fitted coefficients.
    EXPECT_NEAR(linreg_predict(m, matrix_from_rows({{20.0}}))[0], 41.0, 1e-2);
}

TEST(Linreg, MatchesNormalEquationsOracle) {
    std::mt19937_64 rng(50);
    for (int trial = 0; trial < 5; ++trial) {
        const Problem p = random_problem(rng, 50, 3);
        const auto expected = oracle::normal_equations(p.rows, p.targets);
        const LinearModel m = linreg_fit(p.x, p.y);
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(m.weights[j], expected[j], 1e-3);
        EXPECT_NEAR(m.intercept, expected[3], 1e-3);
    }
}

TEST(Linreg, TwoPointStepAlsoConverges) {
    std::mt19937_64 rng(51);
    const Problem p = random_problem(rng, 50, 4);
    const auto expected = oracle::normal_equations(p.rows, p.targets);
    GdConfig cfg;
    cfg.step_mode = StepMode::two_point;
    const LinearModel m = linreg_fit(p.x, p.y, cfg);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(m.weights[j], expected[j], 1e-3);
    EXPECT_LT(m.iterations, 1000u);
}

TEST(Linreg, ConstantFeatureGetsZeroWeight) {
    const Matrix x = matrix_from_rows({{1, 5}, {2, 5}, {3, 5}, {4, 5}});
    const LinearModel m = linreg_fit(x, Vector({3, 5, 7, 9}));
    EXPECT_EQ(m.weights[1], 0.0);
    EXPECT_NEAR(m.weights[0], 2.0, 1e-3);
    EXPECT_NEAR(m.intercept, 1.0, 1e-3);
}

TEST(Linreg, Errors) {
    EXPECT_EQ(error_code([] { linreg_fit(matrix_from_rows({{1}, {2}}), Vector({1})); }), "E_SHAPE");
    EXPECT_EQ(error_code([] { linreg_fit(matrix_from_rows({{1, 2}, {1, 2}, {1, 2}}), Vector({1, 2, 3})); }),
              "E_DEGENERATE");
    LinearModel m{Vector({1.0, 2.0}), 0.0, {}, 0};
    EXPECT_EQ(error_code([&] { linreg_predict(m, matrix_from_rows({{1.0}})); }), "E_SHAPE");
}

TEST(LinregPredict, ConstantAndEmpty) {
    LinearModel m{Vector({0.0, 0.0}), 5.0, {}, 0};
    const Vector out = linreg_predict(m, matrix_from_rows({{1, 2}, {-3, 4}, {0, 0}}));
    for (double v : out.values()) EXPECT_EQ(v, 5.0);
    EXPECT_TRUE(linreg_predict(m, Matrix{}).empty());
}

TEST(GradientDescent, GradientsMatchCentralDifferences) {
    std::mt19937_64 rng(77);
    const Problem p = random_problem(rng, 30, 3);
    const Matrix z = apply_scaling(p.x, fit_scaling(p.x));
    std::vector<double> binary(p.targets.size());
    for (std::size_t i = 0; i < binary.size(); ++i) binary[i] = p.targets[i] > 0 ? 1.0 : 0.0;

    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int point = 0; point < 10; ++point) {
        std::vector<double> params(4);
        for (double& v : params) v = u(rng);
        for (int which = 0; which < 2; ++which) {
            auto obj = [&](const std::vector<double>& q) {
                return which == 0 ? objective::linear(z, p.targets, q) : objective::logistic(z, binary, q);
            };
            const auto analytic = obj(params).grad;
            const auto numeric =
                oracle::central_difference([&](const std::vector<double>& q) { return obj(q).loss; }, params, 1e-6);
            for (std::size_t k = 0; k < params.size(); ++k) {
                const double scale = std::max(std::abs(numeric[k]), 1e-3);
                EXPECT_LT(std::abs(analytic[k] - numeric[k]) / scale, 1e-4) << "objective " << which << " k=" << k;
            }
        }
    }
}

TEST(GradientDescent, LossNonIncreasingAtDefaultStep) {
    std::mt19937_64 rng(78);
    const Problem p = random_problem(rng, 50, 5);
    std::vector<double> losses;
    linreg_fit(p.x, p.y, {}, [&](std::size_t, double l) { losses.push_back(l); });
    ASSERT_GT(losses.size(), 10u);
    for (std::size_t t = 1; t < losses.size(); ++t) ASSERT_LE(losses[t], losses[t - 1]) << "iteration " << t;

    std::vector<Cell> labels;
    for (double t : p.targets) labels.emplace_back(t > 0 ? std::string("pos") : std::string("neg"));
    losses.clear();
    logreg_fit(p.x, labels, {}, [&](std::size_t, double l) { losses.push_back(l); });
    for (std::size_t t = 1; t < losses.size(); ++t) ASSERT_LE(losses[t], losses[t - 1]) << "iteration " << t;
}

TEST(GradientDescent, RejectsBadConfig) {
    GdConfig cfg;
    cfg.step_size = 0.0;
    EXPECT_EQ(error_code([&] { linreg_fit(matrix_from_rows({{1}, {2}}), Vector({1, 2}), cfg); }), "E_ARG");
}

TEST(Logreg, SeparableOneDimensional) {
    std::vector<std::vector<double>> xs;
    std::vector<Cell> ys;
    std::vector<double> flat;
    std::vector<int> oracle_labels;
    for (int i = -10; i <= 10; ++i) {
        if (i == 0) continue;
        xs.push_back({i * 0.5});
        flat.push_back(i * 0.5);
        ys.emplace_back(std::string(i < 0 ? "A" : "B"));
        oracle_labels.push_back(i < 0 ? 0 : 1);
    }
    ASSERT_TRUE(oracle::threshold_separable(flat, oracle_labels));
    const Matrix x = matrix_from_rows(xs);
    const LogisticModel m = logreg_fit(x, ys);
    EXPECT_EQ(m.labels[0], Cell(std::string("A")));
    EXPECT_EQ(accuracy(logreg_predict(m, x).labels, ys), 1.0);
}

TEST(Logreg, LabelCardinality) {
    const Matrix x = matrix_from_rows({{1}, {2}, {3}});
    EXPECT_EQ(error_code([&] { logreg_fit(x, std::vector<Cell>{1.0, 1.0, 1.0}); }), "E_LABEL_CARDINALITY");
    EXPECT_EQ(error_code([&] { logreg_fit(x, std::vector<Cell>{1.0, 2.0, 3.0}); }), "E_LABEL_CARDINALITY");
    EXPECT_EQ(error_code([&] { logreg_fit(x, std::vector<Cell>{1.0, 2.0}); }), "E_SHAPE");
}

TEST(LogregPredict, ZeroModelAndLimits) {
    LogisticModel m{Vector({0.0}), 0.0, {Cell(std::string("no")), Cell(std::string("yes"))}, {}, 0};
    const auto pred = logreg_predict(m, matrix_from_rows({{-4}, {0}, {9}}));
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(pred.probabilities[i], 0.5);
        EXPECT_EQ(pred.labels[i], Cell(std::string("yes")));
    }
    LogisticModel steep{Vector({1.0}), 0.0, m.labels, {}, 0};
    EXPECT_GT(logreg_predict(steep, matrix_from_rows({{30}})).probabilities[0], 1.0 - 1e-12);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 200; ++i) {
        const double p = logreg_predict(steep, matrix_from_rows({{u(rng)}})).probabilities[0];
        EXPECT_GT(p, 0.0);
        EXPECT_LT(p, 1.0);
    }
}

TEST(Logreg, SwappingLabelNamesKeepsPartition) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<double>> xs;
    std::vector<Cell> y, swapped;
    for (int i = 0; i < 80; ++i) {
        const double a = g(rng), b = g(rng);
        xs.push_back({a, b});
        const bool pos = a + 0.5 * b + 0.3 * g(rng) > 0;
        y.emplace_back(std::string(pos ? "alpha" : "beta"));
        swapped.emplace_back(std::string(pos ? "beta" : "alpha"));
    }
    const Matrix x = matrix_from_rows(xs);
    const auto p1 = logreg_predict(logreg_fit(x, y), x);
    const auto p2 = logreg_predict(logreg_fit(x, swapped), x);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        // Same partition: row i is predicted "alpha" under one naming exactly
        // when it is predicted "beta" under the other.
        EXPECT_NE(p1.labels[i], p2.labels[i]) << "row " << i;
    }
}

TEST(Logreg, HabermanBeatsMajorityBaseline) {
    const Dataset d = codec::parse_csv(slurp(std::string(VANLEARN_DATASET_DIR) + "/haberman.csv"));
    ASSERT_EQ(d.row_count(), 306u);
    const Matrix x = numeric_matrix(d, {0, 1, 2});
    std::vector<Cell> y;
    std::size_t ones = 0;
    for (const auto& row : d.rows) {
        y.push_back(row[3]);
        ones += std::get<double>(row[3]) == 1.0 ? 1 : 0;
    }
    const double baseline = static_cast<double>(std::max(ones, d.row_count() - ones)) / static_cast<double>(d.row_count());
    const LogisticModel m = logreg_fit(x, y);
    EXPECT_GE(accuracy(logreg_predict(m, x).labels, y), baseline);
}
