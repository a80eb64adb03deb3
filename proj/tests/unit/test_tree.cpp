#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "vanlearn/codec/csv.hpp"
#include "vanlearn/ml/tree.hpp"

using namespace vanlearn;
using namespace vanlearn::ml;

namespace {

Dataset table(const std::vector<std::vector<double>>& xs, const std::vector<std::string>& labels) {
    Dataset d;
    for (std::size_t j = 0; j < xs[0].size(); ++j) d.columns.push_back("x" + std::to_string(j));
    d.columns.push_back("label");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::vector<Cell> row(xs[i].begin(), xs[i].end());
        row.emplace_back(labels[i]);
        d.rows.push_back(row);
    }
    return d;
}

Matrix features(const Dataset& d) {
    std::vector<std::size_t> cols(d.col_count() - 1);
    for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
    return numeric_matrix(d, cols);
}

std::vector<std::string> labels_of(const Dataset& d) {
    std::vector<std::string> out;
    for (const auto& r : d.rows) out.push_back(cell_to_string(r.back()));
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Dtree, SinglePureSplit) {
    const Dataset d = table({{1}, {2}, {9}, {10}}, {"A", "A", "B", "B"});
    const TreeModel m = dtree_fit(d);
    EXPECT_EQ(m.depth(), 1u);
    const auto& root = std::get<TreeSplit>(m.nodes[0]);
    EXPECT_EQ(root.feature, 0u);
    EXPECT_EQ(root.threshold, 5.5);
    EXPECT_EQ(dtree_predict(m, features(d)), labels_of(d));
}

TEST(Dtree, ConflictingDuplicatesGiveMajorityLeaf) {
    const Dataset d = table({{1}, {1}, {1}}, {"A", "B", "A"});
    const TreeModel m = dtree_fit(d);
    ASSERT_EQ(m.nodes.size(), 1u);
    EXPECT_EQ(std::get<TreeLeaf>(m.nodes[0]).label, "A");
    EXPECT_EQ(std::get<TreeLeaf>(m.nodes[0]).count, 3u);
}

TEST(Dtree, MajorityTieGoesToSmallestLabel) {
    const TreeModel m = dtree_fit(table({{1}, {1}}, {"zeta", "alpha"}));
    EXPECT_EQ(std::get<TreeLeaf>(m.nodes[0]).label, "alpha");
}

TEST(Dtree, SingleLeafPredictsConstant) {
    const TreeModel m = dtree_fit(table({{1}, {2}, {3}}, {"k", "k", "k"}));
    EXPECT_EQ(dtree_predict(m, matrix_from_rows({{-100}, {0}, {1e9}})), (std::vector<std::string>{"k", "k", "k"}));
}

TEST(Dtree, XorNeedsZeroGainSplit) {
    const Dataset d = table({{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {"A", "A", "B", "B"});
    const TreeModel m = dtree_fit(d);
    EXPECT_EQ(dtree_predict(m, features(d)), labels_of(d));
}

TEST(Dtree, MaxDepthLimitsGrowth) {
    const Dataset d = table({{1}, {2}, {3}, {4}, {5}, {6}}, {"A", "B", "A", "B", "A", "B"});
    EXPECT_LE(dtree_fit(d, 1).depth(), 1u);
    EXPECT_EQ(dtree_fit(d, 0).nodes.size(), 1u);
}

TEST(Dtree, SplitTieBreaksOnLowestFeatureThenThreshold) {
    // Both features separate the classes perfectly; feature 0 must win.
    const Dataset d = table({{1, 10}, {2, 20}, {3, 30}, {4, 40}}, {"A", "A", "B", "B"});
    const TreeModel m = dtree_fit(d);
    const auto& root = std::get<TreeSplit>(m.nodes[0]);
    EXPECT_EQ(root.feature, 0u);
    EXPECT_EQ(root.threshold, 2.5);
}

TEST(Dtree, NumericLabelsAndErrors) {
    Dataset d{{"x", "y"}, {{1.0, 1.0}, {2.0, 2.0}}};
    const TreeModel m = dtree_fit(d);
    EXPECT_EQ(m.class_labels, (std::vector<std::string>{"1", "2"}));

    Dataset bad{{"x", "y"}, {{std::string("a"), 1.0}}};
    try {
        dtree_fit(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "E_SCHEMA");
    }
    try {
        dtree_fit(Dataset{{"x", "y"}, {}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "E_EMPTY");
    }
    try {
        dtree_predict(m, matrix_from_rows({{1, 2}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "E_SHAPE");
    }
}

TEST(Dtree, PerfectTrainingAccuracyWithoutContradictions) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng() % 60, dims = 1 + rng() % 3;
        std::vector<std::vector<double>> xs;
        std::vector<std::string> ys;
        std::map<std::vector<double>, std::string> seen;
        while (xs.size() < n) {
            std::vector<double> x(dims);
            for (double& v : x) v = static_cast<double>(rng() % 6);  // coarse grid forces duplicates
            std::string y(1, static_cast<char>('a' + rng() % 3));
            auto [it, fresh] = seen.emplace(x, y);
            if (!fresh) y = it->second;  // duplicates keep a consistent label
            xs.push_back(x);
            ys.push_back(y);
        }
        const Dataset d = table(xs, ys);
        EXPECT_EQ(dtree_predict(dtree_fit(d), features(d)), ys);
    }
}

TEST(Dtree, IrisUnrestrictedDepthIsPerfect) {
    const Dataset d = codec::parse_csv(slurp(std::string(VANLEARN_DATASET_DIR) + "/iris.csv"));
    ASSERT_EQ(d.row_count(), 150u);
    std::map<std::vector<double>, std::string> seen;
    const Matrix x = features(d);
    const auto y = labels_of(d);
    for (std::size_t i = 0; i < d.row_count(); ++i) {
        auto [it, fresh] = seen.emplace(std::vector<double>(x.row(i).begin(), x.row(i).end()), y[i]);
        ASSERT_TRUE(fresh || it->second == y[i]) << "contradictory duplicate at row " << i;
    }
    const TreeModel m = dtree_fit(d);
    EXPECT_EQ(dtree_predict(m, x), y);
    EXPECT_EQ(m.class_labels.size(), 3u);
}
