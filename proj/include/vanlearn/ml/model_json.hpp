#pragma once

// Versioned JSON documents for trained models, as stored with each result.
//
//   {"version":1,"kind":"kmeans","centroids":[[..],..],"assignments":[..],...}
//
// Doubles are written in shortest round-trip form, so a model survives
// serialize -> parse bit-exactly.

#include <string>
#include <variant>

#include <json.hpp>

#include "vanlearn/algorithm.hpp"
#include "vanlearn/dataset.hpp"
#include "vanlearn/error.hpp"
#include "vanlearn/ml/kmeans.hpp"
#include "vanlearn/ml/linear.hpp"
#include "vanlearn/ml/logistic.hpp"
#include "vanlearn/ml/tree.hpp"

namespace vanlearn::ml {

using TrainedModel = std::variant<KMeansModel, LinearModel, LogisticModel, TreeModel>;

inline constexpr int model_format_version = 1;

inline Algorithm algorithm_of(const TrainedModel& m) {
    switch (m.index()) {
        case 0: return Algorithm::kmeans;
        case 1: return Algorithm::linreg;
        case 2: return Algorithm::logreg;
        default: return Algorithm::dtree;
    }
}

namespace detail {

using nlohmann::json;

inline json cell_json(const Cell& c) {
    if (const double* v = std::get_if<double>(&c)) return *v;
    return std::get<std::string>(c);
}

inline Cell json_cell(const json& j) {
    if (j.is_number()) return j.get<double>();
    return j.get<std::string>();
}

inline json scaling_json(const std::vector<FeatureScale>& s) {
    json arr = json::array();
    for (const auto& f : s) arr.push_back({{"mean", f.mean}, {"stddev", f.stddev}, {"constant", f.constant}});
    return arr;
}

inline std::vector<FeatureScale> json_scaling(const json& arr) {
    std::vector<FeatureScale> out;
    for (const auto& f : arr)
        out.push_back({f.at("mean").get<double>(), f.at("stddev").get<double>(), f.at("constant").get<bool>()});
    return out;
}

inline json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    return rows;
}

inline Matrix json_matrix(const json& rows) {
    return matrix_from_rows(rows.get<std::vector<std::vector<double>>>());
}

}  // namespace detail

inline nlohmann::json model_to_json(const TrainedModel& model) {
    using detail::json;
    json j{{"version", model_format_version}, {"kind", std::string(to_string(algorithm_of(model)))}};
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, KMeansModel>) {
                j["centroids"] = detail::matrix_json(m.centroids);
                j["dims"] = {m.centroids.rows(), m.centroids.cols()};
                j["assignments"] = m.assignments;
                j["inertia"] = m.inertia;
                j["iterations"] = m.iterations_run;
            } else if constexpr (std::is_same_v<T, LinearModel>) {
                j["weights"] = m.weights.to_std();
                j["intercept"] = m.intercept;
                j["scaling"] = detail::scaling_json(m.scaling);
                j["iterations"] = m.iterations;
            } else if constexpr (std::is_same_v<T, LogisticModel>) {
                j["weights"] = m.weights.to_std();
                j["intercept"] = m.intercept;
                j["labels"] = {detail::cell_json(m.labels[0]), detail::cell_json(m.labels[1])};
                j["scaling"] = detail::scaling_json(m.scaling);
                j["iterations"] = m.iterations;
            } else {
                json nodes = json::array();
                for (const auto& node : m.nodes) {
                    if (const auto* leaf = std::get_if<TreeLeaf>(&node))
                        nodes.push_back({{"leaf", leaf->label}, {"count", leaf->count}});
                    else {
                        const auto& s = std::get<TreeSplit>(node);
                        nodes.push_back(
                            {{"feature", s.feature}, {"threshold", s.threshold}, {"left", s.left}, {"right", s.right}});
                    }
                }
                j["nodes"] = std::move(nodes);
                j["class_labels"] = m.class_labels;
                j["feature_names"] = m.feature_names;
            }
        },
        model);
    return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("version").get<int>() != model_format_version)
            throw Error("E_MODEL_FORMAT", "unsupported model document version");
        const Algorithm kind = parse_algorithm(j.at("kind").get<std::string>());
        switch (kind) {
            case Algorithm::kmeans: {
                KMeansModel m;
                const auto dims = j.at("dims").get<std::vector<std::size_t>>();
                m.centroids = j.at("centroids").empty() ? Matrix(dims.at(0), dims.at(1), {})
                                                        : detail::json_matrix(j.at("centroids"));
                m.assignments = j.at("assignments").get<std::vector<std::size_t>>();
                m.inertia = j.at("inertia").get<double>();
                m.iterations_run = j.at("iterations").get<std::size_t>();
                return m;
            }
            case Algorithm::linreg:
                return LinearModel{Vector(j.at("weights").get<std::vector<double>>()), j.at("intercept").get<double>(),
                                   detail::json_scaling(j.at("scaling")), j.at("iterations").get<std::size_t>()};
            case Algorithm::logreg: {
                const auto& labels = j.at("labels");
                return LogisticModel{Vector(j.at("weights").get<std::vector<double>>()),
                                     j.at("intercept").get<double>(),
                                     {detail::json_cell(labels.at(0)), detail::json_cell(labels.at(1))},
                                     detail::json_scaling(j.at("scaling")),
                                     j.at("iterations").get<std::size_t>()};
            }
            case Algorithm::dtree: {
                TreeModel m;
                for (const auto& node : j.at("nodes")) {
                    if (node.contains("leaf"))
                        m.nodes.emplace_back(TreeLeaf{node.at("leaf").get<std::string>(), node.at("count").get<std::size_t>()});
                    else
                        m.nodes.emplace_back(TreeSplit{node.at("feature").get<std::size_t>(),
                                                       node.at("threshold").get<double>(),
                                                       node.at("left").get<std::size_t>(),
                                                       node.at("right").get<std::size_t>()});
                }
                m.class_labels = j.at("class_labels").get<std::vector<std::string>>();
                m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
                return m;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("E_MODEL_FORMAT", std::string("malformed model document: ") + e.what());
    }
    throw Error("E_MODEL_FORMAT", "unknown model kind");
}

// Number of input features the model expects at predict time (0 for k-means,
// which has no predict step in the service).
inline std::size_t feature_count(const TrainedModel& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, KMeansModel>)
                return m.centroids.cols();
            else if constexpr (std::is_same_v<T, TreeModel>)
                return m.feature_count();
            else
                return m.weights.size();
        },
        model);
}

}  // namespace vanlearn::ml
