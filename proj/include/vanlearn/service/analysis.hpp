#pragma once

// Train / predict request handling without any HTTP: request parsing, schema
// checks, running the fit under a deadline, and building the output table.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "vanlearn/codec/wire.hpp"
#include "vanlearn/deadline.hpp"
#include "vanlearn/ml/model_json.hpp"
#include "vanlearn/validator.hpp"

namespace vanlearn::service {

using nlohmann::json;

namespace ecode {
inline constexpr const char* request = "E_REQUEST";
inline constexpr const char* params = "E_PARAMS";
inline constexpr const char* validation = "E_VALIDATION";  // see ValidationFailed
inline constexpr const char* unsupported = "E_UNSUPPORTED";
}  // namespace ecode

inline json violation_json(const Violation& v) {
    json j{{"code", v.code}, {"message", v.message}};
    if (v.row) j["row"] = *v.row;
    if (v.col) j["col"] = *v.col;
    return j;
}

struct AnalysisRequest {
    Algorithm algorithm = Algorithm::kmeans;
    std::size_t k = 0;                               // kmeans
    std::variant<std::monostate, std::size_t, std::string> target;  // linreg / logreg: index or column name
    std::optional<std::string> data;                 // inline wire payload
    std::optional<std::int64_t> dataset_id;

    // Shape of the body: {"algorithm", "params": {...}, "data" | "dataset_id"}.
    static AnalysisRequest from_json(const json& body) {
        if (!body.is_object()) throw Error(ecode::request, "request body must be a JSON object");
        for (const auto& [key, _] : body.items())
            if (key != "algorithm" && key != "params" && key != "data" && key != "dataset_id")
                throw Error(ecode::request, "unknown request field '" + key + "'");
        if (!body.contains("algorithm") || !body["algorithm"].is_string())
            throw Error(ecode::request, "'algorithm' must be a string");

        AnalysisRequest r;
        r.algorithm = parse_algorithm(body["algorithm"].get<std::string>());

        const bool has_data = body.contains("data"), has_id = body.contains("dataset_id");
        if (has_data == has_id) throw Error(ecode::request, "give exactly one of 'data' or 'dataset_id'");
        if (has_data) {
            if (!body["data"].is_string()) throw Error(ecode::request, "'data' must be a wire-format string");
            r.data = body["data"].get<std::string>();
        } else {
            if (!body["dataset_id"].is_number_integer()) throw Error(ecode::request, "'dataset_id' must be an integer");
            r.dataset_id = body["dataset_id"].get<std::int64_t>();
        }

        const json params = body.value("params", json::object());
        if (!params.is_object()) throw Error(ecode::params, "'params' must be an object");
        const char* expected = r.algorithm == Algorithm::kmeans  ? "k"
                               : r.algorithm == Algorithm::dtree ? nullptr
                                                                 : "target_column";
        for (const auto& [key, _] : params.items())
            if (expected == nullptr || key != expected)
                throw Error(ecode::params, std::string(to_string(r.algorithm)) + " does not take parameter '" + key +
                                               "' (takes " + std::to_string(parameter_arity(r.algorithm)) + ")");
        if (expected != nullptr && !params.contains(expected))
            throw Error(ecode::params, std::string(to_string(r.algorithm)) + " needs parameter '" + expected + "'");

        if (r.algorithm == Algorithm::kmeans) {
            const json& k = params["k"];
            if (!k.is_number_integer() || k.get<std::int64_t>() < 1)
                throw Error(ecode::params, "'k' must be a positive integer");
            r.k = k.get<std::size_t>();
        } else if (expected != nullptr) {
            const json& t = params["target_column"];
            if (t.is_string()) {
                r.target = t.get<std::string>();
            } else if (t.is_number_integer()) {
                // Negative indices are left for the schema check to report.
                r.target = t.get<std::int64_t>() < 0 ? std::numeric_limits<std::size_t>::max() : t.get<std::size_t>();
            } else {
                throw Error(ecode::params, "'target_column' must be a column index or name");
            }
        }
        return r;
    }
};

// Server-side schema check. Returns the resolved target index for regressions.
inline std::optional<std::size_t> check_schema(const Dataset& d, const AnalysisRequest& req) {
    SchemaRequirement s{req.algorithm, std::nullopt};
    ValidationReport extra;
    if (const auto* idx = std::get_if<std::size_t>(&req.target)) {
        s.target_column = *idx;
    } else if (const auto* name = std::get_if<std::string>(&req.target)) {
        std::size_t j = 0;
        while (j < d.col_count() && d.columns[j] != *name) ++j;
        if (j == d.col_count()) {
            extra.add(violation::target_range, "no column named '" + *name + "'");
            j = std::numeric_limits<std::size_t>::max();
        }
        s.target_column = j;
    }
    ValidationReport r = validate_schema(d, s);
    if (!extra.ok()) {
        // The name lookup message is more useful than the generic range one.
        std::erase_if(r.violations, [](const Violation& v) { return v.code == violation::target_range; });
        extra.merge(r);
        r = extra;
    }
    if (!r.ok()) throw ValidationFailed(r);
    return s.target_column;
}

struct Outcome {
    ml::TrainedModel model;
    Dataset output;
    json summary;
};

namespace detail {

inline std::string fresh_column(const Dataset& d, std::string name) {
    auto taken = [&](const std::string& n) { return std::find(d.columns.begin(), d.columns.end(), n) != d.columns.end(); };
    while (taken(name)) name += "_";
    return name;
}

inline Dataset with_column(const Dataset& d, const std::string& name, const std::vector<Cell>& values) {
    Dataset out = d;
    out.columns.push_back(fresh_column(d, name));
    for (std::size_t i = 0; i < out.rows.size(); ++i) out.rows[i].push_back(values[i]);
    return out;
}

inline Cell label_cell(const std::string& label) {
    double v = 0.0;
    if (lex_number(label, v)) return v;
    return label;
}

inline json cell_json(const Cell& c) {
    if (is_number(c)) return std::get<double>(c);
    return std::get<std::string>(c);
}

inline Dataset coefficient_table(const std::vector<std::string>& names, const Vector& w, double intercept) {
    Dataset t{{"term", "coefficient"}, {}};
    for (std::size_t j = 0; j < names.size(); ++j) t.rows.push_back({names[j], w[j]});
    t.rows.push_back({std::string("(intercept)"), intercept});
    return t;
}

inline Dataset tree_table(const ml::TreeModel& m) {
    Dataset t{{"node", "kind", "feature", "threshold", "left", "right", "label", "count"}, {}};
    const std::string none;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        if (const auto* s = std::get_if<ml::TreeSplit>(&m.nodes[i]))
            t.rows.push_back({static_cast<double>(i), std::string("split"), m.feature_names[s->feature], s->threshold,
                              static_cast<double>(s->left), static_cast<double>(s->right), none, none});
        else {
            const auto& l = std::get<ml::TreeLeaf>(m.nodes[i]);
            t.rows.push_back({static_cast<double>(i), std::string("leaf"), none, none, none, none,
                              label_cell(l.label), static_cast<double>(l.count)});
        }
    }
    return t;
}

inline std::vector<std::size_t> all_but(std::size_t n, std::size_t skip) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j)
        if (j != skip) out.push_back(j);
    return out;
}

}  // namespace detail

// Runs a validated training request. `target` is what check_schema returned.
inline Outcome train(const Dataset& d, const AnalysisRequest& req, std::optional<std::size_t> target,
                     const Deadline& deadline) {
    switch (req.algorithm) {
        case Algorithm::kmeans: {
            const Matrix x = numeric_matrix(d);
            ml::KMeansConfig cfg;
            cfg.k = req.k;
            ml::KMeansModel m = ml::kmeans_fit(x, cfg, {}, deadline);
            std::vector<Cell> cluster;
            for (std::size_t a : m.assignments) cluster.emplace_back(static_cast<double>(a));
            json centroids = json::array();
            for (std::size_t c = 0; c < m.centroids.rows(); ++c)
                centroids.push_back(std::vector<double>(m.centroids.row(c).begin(), m.centroids.row(c).end()));
            json summary{{"k", req.k},          {"inertia", m.inertia},   {"iterations", m.iterations_run},
                         {"centroids", centroids}, {"assignments", m.assignments}};
            return {std::move(m), detail::with_column(d, "cluster", cluster), std::move(summary)};
        }
        case Algorithm::linreg: {
            const auto features = detail::all_but(d.col_count(), *target);
            const Matrix x = numeric_matrix(d, features);
            const Matrix yv = numeric_matrix(d, {*target});
            const Vector y(std::vector<double>(yv.values().begin(), yv.values().end()));
            ml::LinearModel m = ml::linreg_fit(x, y, {}, {}, deadline);
            const Vector fitted = ml::linreg_predict(m, x);
            double sse = 0.0, mean = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) mean += y[i];
            mean /= static_cast<double>(y.size());
            double sst = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                sse += (fitted[i] - y[i]) * (fitted[i] - y[i]);
                sst += (y[i] - mean) * (y[i] - mean);
            }
            std::vector<std::string> names;
            json coef = json::object();
            for (std::size_t j = 0; j < features.size(); ++j) {
                names.push_back(d.columns[features[j]]);
                coef[names.back()] = m.weights[j];
            }
            json summary{{"target", d.columns[*target]},
                         {"coefficients", coef},
                         {"intercept", m.intercept},
                         {"mse", sse / static_cast<double>(y.size())},
                         {"iterations", m.iterations}};
            summary["r2"] = sst > 0.0 ? json(1.0 - sse / sst) : json(nullptr);
            Dataset out = detail::coefficient_table(names, m.weights, m.intercept);
            return {std::move(m), std::move(out), std::move(summary)};
        }
        case Algorithm::logreg: {
            const auto features = detail::all_but(d.col_count(), *target);
            const Matrix x = numeric_matrix(d, features);
            std::vector<Cell> y;
            for (const auto& row : d.rows) y.push_back(row[*target]);
            ml::LogisticModel m = ml::logreg_fit(x, y, {}, {}, deadline);
            const auto pred = ml::logreg_predict(m, x);
            std::vector<std::string> names;
            json coef = json::object();
            for (std::size_t j = 0; j < features.size(); ++j) {
                names.push_back(d.columns[features[j]]);
                coef[names.back()] = m.weights[j];
            }
            json summary{{"target", d.columns[*target]},
                         {"coefficients", coef},
                         {"intercept", m.intercept},
                         {"labels", {detail::cell_json(m.labels[0]), detail::cell_json(m.labels[1])}},
                         {"accuracy", ml::accuracy(pred.labels, y)},
                         {"iterations", m.iterations}};
            Dataset out = detail::coefficient_table(names, m.weights, m.intercept);
            return {std::move(m), std::move(out), std::move(summary)};
        }
        case Algorithm::dtree: {
            ml::TreeModel m = ml::dtree_fit(d, std::nullopt, deadline);
            const auto predicted = ml::dtree_predict(m, numeric_matrix(d, detail::all_but(d.col_count(), d.col_count() - 1)));
            std::size_t hits = 0;
            for (std::size_t i = 0; i < d.row_count(); ++i) hits += predicted[i] == cell_to_string(d.rows[i].back());
            json summary{{"target", d.columns.back()},
                         {"depth", m.depth()},
                         {"leaves", m.leaf_count()},
                         {"nodes", m.nodes.size()},
                         {"classes", m.class_labels},
                         {"accuracy", static_cast<double>(hits) / static_cast<double>(d.row_count())}};
            Dataset out = detail::tree_table(m);
            return {std::move(m), std::move(out), std::move(summary)};
        }
    }
    throw Error(ecode::unsupported, "unknown algorithm");
}

// Applies a stored supervised model to new rows: the output is the input plus
// a "prediction" column. Inputs must hold exactly the model's feature columns.
inline Outcome predict(const ml::TrainedModel& model, const Dataset& d, const Deadline& deadline) {
    const Algorithm algo = ml::algorithm_of(model);
    if (algo == Algorithm::kmeans)
        throw Error(ecode::unsupported, "k-means results have no prediction step; train again with new data");
    const std::size_t want = ml::feature_count(model);
    if (d.col_count() != want)
        throw Error(errc::shape, "model expects " + std::to_string(want) + " feature columns, data has " +
                                     std::to_string(d.col_count()));
    ValidationReport r;
    std::size_t located = 0, folded = 0;
    for (std::size_t i = 0; i < d.row_count(); ++i)
        for (std::size_t j = 0; j < d.col_count(); ++j)
            if (!is_number(d.rows[i][j])) {
                if (located < max_located_violations) {
                    r.add(violation::non_numeric, "'" + d.columns[j] + "' row " + std::to_string(i) + " is not a number",
                          i, j);
                    ++located;
                } else {
                    ++folded;
                }
            }
    if (folded > 0) r.add(violation::non_numeric, std::to_string(folded) + " more non-numeric cells");
    if (!r.ok()) throw ValidationFailed(r);

    deadline.check();
    const Matrix x = numeric_matrix(d);
    std::vector<Cell> out;
    json summary{{"rows", d.row_count()}};
    if (const auto* m = std::get_if<ml::LinearModel>(&model)) {
        const Vector p = ml::linreg_predict(*m, x);
        out.assign(p.values().begin(), p.values().end());
    } else if (const auto* m = std::get_if<ml::LogisticModel>(&model)) {
        const auto p = ml::logreg_predict(*m, x);
        out = p.labels;
        summary["probabilities"] = p.probabilities.to_std();
    } else {
        for (const auto& label : ml::dtree_predict(std::get<ml::TreeModel>(model), x))
            out.push_back(detail::label_cell(label));
    }
    deadline.check();
    return {model, detail::with_column(d, "prediction", out), std::move(summary)};
}

}  // namespace vanlearn::service
