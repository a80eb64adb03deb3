#pragma once

// CART classification tree grown on Gini impurity.
//
// The output is always the last dataset column (any cell type, compared as
// strings); every other column must be numeric. Candidate thresholds are the
// midpoints between consecutive distinct sorted feature values, and a row goes
// left when value <= threshold.
//
// A node becomes a leaf when it is pure, when it sits at max_depth, or when all
// of its rows share one feature vector. Otherwise it splits on the highest
// Gini gain; gains within split_gain_epsilon of each other count as tied and
// the lowest feature index, then the lowest threshold, wins. Zero-gain splits
// are taken when nothing better exists, so an unrestricted tree always
// separates rows whose feature vectors differ.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vanlearn/dataset.hpp"
#include "vanlearn/deadline.hpp"
#include "vanlearn/error.hpp"
#include "vanlearn/tensor.hpp"

namespace vanlearn::ml {

inline constexpr double split_gain_epsilon = 1e-12;

struct TreeLeaf {
    std::string label;
    std::size_t count = 0;

    friend bool operator==(const TreeLeaf&, const TreeLeaf&) = default;
};

struct TreeSplit {
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0;  // node indices into TreeModel::nodes
    std::size_t right = 0;

    friend bool operator==(const TreeSplit&, const TreeSplit&) = default;
};

using TreeNode = std::variant<TreeLeaf, TreeSplit>;

// Nodes are stored flat; nodes[0] is the root and children always follow
// their parent.
struct TreeModel {
    std::vector<TreeNode> nodes;
    std::vector<std::string> class_labels;  // sorted, distinct
    std::vector<std::string> feature_names;

    std::size_t feature_count() const noexcept { return feature_names.size(); }

    std::size_t depth() const {
        std::vector<std::size_t> level(nodes.size(), 0);
        std::size_t deepest = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            deepest = std::max(deepest, level[i]);
            if (const auto* s = std::get_if<TreeSplit>(&nodes[i])) {
                level[s->left] = level[i] + 1;
                level[s->right] = level[i] + 1;
            }
        }
        return deepest;
    }

    std::size_t leaf_count() const {
        return static_cast<std::size_t>(
            std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return std::holds_alternative<TreeLeaf>(n); }));
    }

    friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

namespace detail {

inline double gini(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double sum_sq = 0.0;
    const double t = static_cast<double>(total);
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / t;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

inline std::optional<SplitChoice> best_split(const Matrix& x, const std::vector<std::size_t>& y,
                                             std::size_t n_classes, const std::vector<std::size_t>& rows) {
    const std::size_t n = rows.size();
    std::vector<std::size_t> total(n_classes, 0);
    for (std::size_t r : rows) ++total[y[r]];
    const double parent = gini(total, n);

    std::optional<SplitChoice> best;
    std::vector<std::size_t> order(rows);
    std::vector<std::size_t> left(n_classes);
    std::vector<std::size_t> right(n_classes);

    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = x(a, f);
            const double vb = x(b, f);
            return va < vb || (va == vb && a < b);
        });
        std::fill(left.begin(), left.end(), 0);
        right = total;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const std::size_t r = order[i];
            ++left[y[r]];
            --right[y[r]];
            const double lo = x(r, f);
            const double hi = x(order[i + 1], f);
            if (!(lo < hi)) continue;

            const std::size_t nl = i + 1;
            const std::size_t nr = n - nl;
            const double child = (static_cast<double>(nl) * gini(left, nl) + static_cast<double>(nr) * gini(right, nr)) /
                                 static_cast<double>(n);
            const double gain = parent - child;
            if (!best || gain > best->gain + split_gain_epsilon) {
                double mid = lo + (hi - lo) / 2.0;
                if (!(mid >= lo && mid < hi)) mid = lo;
                best = SplitChoice{f, mid, gain};
            }
        }
    }
    return best;
}

}  // namespace detail

inline TreeModel dtree_fit(const Dataset& dataset, std::optional<std::size_t> max_depth = std::nullopt,
                           const Deadline& deadline = Deadline::none()) {
    if (dataset.col_count() < 2)
        throw Error(errc::schema, "decision tree needs at least one feature column plus the output column");
    if (dataset.row_count() == 0) throw Error(errc::empty, "decision tree needs at least one row");

    const std::size_t d = dataset.col_count() - 1;
    std::vector<std::size_t> feature_cols(d);
    std::iota(feature_cols.begin(), feature_cols.end(), std::size_t{0});
    const Matrix x = numeric_matrix(dataset, feature_cols);

    TreeModel model;
    model.feature_names.assign(dataset.columns.begin(), dataset.columns.end() - 1);

    std::vector<std::string> raw_labels;
    raw_labels.reserve(dataset.row_count());
    for (const auto& row : dataset.rows) raw_labels.push_back(cell_to_string(row.back()));
    model.class_labels = raw_labels;
    std::sort(model.class_labels.begin(), model.class_labels.end());
    model.class_labels.erase(std::unique(model.class_labels.begin(), model.class_labels.end()),
                             model.class_labels.end());

    std::vector<std::size_t> y(raw_labels.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = static_cast<std::size_t>(
            std::lower_bound(model.class_labels.begin(), model.class_labels.end(), raw_labels[i]) -
            model.class_labels.begin());
    const std::size_t n_classes = model.class_labels.size();

    struct Pending {
        std::size_t node;
        std::size_t depth;
        std::vector<std::size_t> rows;
    };
    std::vector<Pending> stack;
    std::vector<std::size_t> all(dataset.row_count());
    std::iota(all.begin(), all.end(), std::size_t{0});
    model.nodes.emplace_back(TreeLeaf{});
    stack.push_back({0, 0, std::move(all)});

    while (!stack.empty()) {
        deadline.check();
        Pending job = std::move(stack.back());
        stack.pop_back();

        std::vector<std::size_t> counts(n_classes, 0);
        for (std::size_t r : job.rows) ++counts[y[r]];
        const std::size_t distinct_present =
            static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));

        std::optional<detail::SplitChoice> split;
        if (distinct_present > 1 && (!max_depth || job.depth < *max_depth))
            split = detail::best_split(x, y, n_classes, job.rows);

        if (!split) {
            // Majority; max_element returns the first maximum, i.e. the smallest label.
            const auto top = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
            model.nodes[job.node] = TreeLeaf{model.class_labels[top], job.rows.size()};
            continue;
        }

        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (std::size_t r : job.rows) (x(r, split->feature) <= split->threshold ? left_rows : right_rows).push_back(r);

        const std::size_t left = model.nodes.size();
        model.nodes.emplace_back(TreeLeaf{});
        const std::size_t right = model.nodes.size();
        model.nodes.emplace_back(TreeLeaf{});
        model.nodes[job.node] = TreeSplit{split->feature, split->threshold, left, right};
        stack.push_back({right, job.depth + 1, std::move(right_rows)});
        stack.push_back({left, job.depth + 1, std::move(left_rows)});
    }
    return model;
}

inline const std::string& dtree_route(const TreeModel& model, std::span<const double> features) {
    std::size_t at = 0;
    for (;;) {
        const auto& node = model.nodes[at];
        if (const auto* leaf = std::get_if<TreeLeaf>(&node)) return leaf->label;
        const auto& s = std::get<TreeSplit>(node);
        at = features[s.feature] <= s.threshold ? s.left : s.right;
    }
}

inline std::vector<std::string> dtree_predict(const TreeModel& model, const Matrix& x) {
    if (x.rows() > 0 && x.cols() != model.feature_count())
        throw Error(errc::shape, "dtree_predict: tree expects " + std::to_string(model.feature_count()) +
                                     " features, input has " + std::to_string(x.cols()));
    std::vector<std::string> out;
    out.reserve(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(dtree_route(model, x.row(i)));
    return out;
}

}  // namespace vanlearn::ml
