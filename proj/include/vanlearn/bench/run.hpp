#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "vanlearn/algorithm.hpp"
#include "vanlearn/codec/csv.hpp"
#include "vanlearn/ml/kmeans.hpp"
#include "vanlearn/ml/linear.hpp"
#include "vanlearn/ml/logistic.hpp"
#include "vanlearn/ml/tree.hpp"
#include "vanlearn/validator.hpp"

namespace vanlearn::bench {

struct BenchRow {
    std::string module_name;
    std::string dataset_name;
    double training_secs = 0.0;
    std::optional<double> test_secs;  // k-means has no prediction phase
    int parameter_count = 0;
    int click_count = 0;
    std::string metric;  // quality figure for the run, e.g. "accuracy=1"
};

struct RunSpec {
    Algorithm algorithm = Algorithm::kmeans;
    std::optional<std::size_t> k;
    std::optional<std::string> target;       // column name or index; defaults to the last column
    std::optional<std::string> drop_column;  // e.g. the class label when clustering
};

namespace detail {

inline std::size_t resolve_column(const Dataset& d, const std::string& ref) {
    for (std::size_t j = 0; j < d.col_count(); ++j)
        if (d.columns[j] == ref) return j;
    std::size_t idx = 0;
    auto [p, ec] = std::from_chars(ref.data(), ref.data() + ref.size(), idx);
    if (ec == std::errc{} && p == ref.data() + ref.size() && idx < d.col_count()) return idx;
    ValidationReport r;
    r.add(violation::target_range, "no column named '" + ref + "'");
    throw ValidationFailed(r);
}

inline Dataset without_column(const Dataset& d, std::size_t j) {
    Dataset out;
    for (std::size_t c = 0; c < d.col_count(); ++c)
        if (c != j) out.columns.push_back(d.columns[c]);
    for (const auto& row : d.rows) {
        std::vector<Cell> r;
        for (std::size_t c = 0; c < row.size(); ++c)
            if (c != j) r.push_back(row[c]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

inline std::vector<std::size_t> all_but(std::size_t n, std::size_t skip) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j)
        if (j != skip) out.push_back(j);
    return out;
}

template <typename F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string format_metric(const char* name, double v) { return std::string(name) + "=" + format_number(v); }

}  // namespace detail

// Validates, then times the fit and (for supervised models) a prediction pass
// over the same rows. Only the fit and predict calls are inside the timers.
inline BenchRow run_benchmark(const Dataset& input, const std::string& dataset_name, const RunSpec& spec,
                              const ValidationRules& rules = {}) {
    Dataset d = input;
    if (spec.drop_column) d = detail::without_column(d, detail::resolve_column(d, *spec.drop_column));

    ValidationReport size = validate_size(0, d.row_count(), d.col_count(), rules);
    std::optional<std::size_t> target;
    if (spec.algorithm == Algorithm::linreg || spec.algorithm == Algorithm::logreg)
        target = spec.target ? detail::resolve_column(d, *spec.target) : d.col_count() - 1;
    ValidationReport r = validate_schema(d, {spec.algorithm, target});
    r.merge(size);
    if (!r.ok()) throw ValidationFailed(r);

    BenchRow row;
    row.module_name = std::string(display_name(spec.algorithm));
    row.dataset_name = dataset_name;
    row.parameter_count = parameter_arity(spec.algorithm);
    row.click_count = click_count(spec.algorithm);

    switch (spec.algorithm) {
        case Algorithm::kmeans: {
            if (!spec.k) throw Error(errc::argument, "k-means needs --k");
            const Matrix x = numeric_matrix(d);
            ml::KMeansConfig cfg;
            cfg.k = *spec.k;
            ml::KMeansModel m;
            row.training_secs = detail::seconds([&] { m = ml::kmeans_fit(x, cfg); });
            row.metric = detail::format_metric("inertia", m.inertia);
            break;
        }
        case Algorithm::linreg: {
            const Matrix x = numeric_matrix(d, detail::all_but(d.col_count(), *target));
            const Matrix yv = numeric_matrix(d, {*target});
            const Vector y(std::vector<double>(yv.values().begin(), yv.values().end()));
            ml::LinearModel m;
            row.training_secs = detail::seconds([&] { m = ml::linreg_fit(x, y); });
            Vector pred;
            row.test_secs = detail::seconds([&] { pred = ml::linreg_predict(m, x); });
            double sse = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) sse += (pred[i] - y[i]) * (pred[i] - y[i]);
            row.metric = detail::format_metric("mse", sse / static_cast<double>(y.size()));
            break;
        }
        case Algorithm::logreg: {
            const Matrix x = numeric_matrix(d, detail::all_but(d.col_count(), *target));
            std::vector<Cell> y;
            for (const auto& rw : d.rows) y.push_back(rw[*target]);
            ml::LogisticModel m;
            row.training_secs = detail::seconds([&] { m = ml::logreg_fit(x, y); });
            ml::LogisticPrediction pred;
            row.test_secs = detail::seconds([&] { pred = ml::logreg_predict(m, x); });
            row.metric = detail::format_metric("accuracy", ml::accuracy(pred.labels, y));
            break;
        }
        case Algorithm::dtree: {
            const Matrix x = numeric_matrix(d, detail::all_but(d.col_count(), d.col_count() - 1));
            ml::TreeModel m;
            row.training_secs = detail::seconds([&] { m = ml::dtree_fit(d); });
            std::vector<std::string> pred;
            row.test_secs = detail::seconds([&] { pred = ml::dtree_predict(m, x); });
            std::size_t hits = 0;
            for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == cell_to_string(d.rows[i].back());
            row.metric = detail::format_metric("accuracy", static_cast<double>(hits) / static_cast<double>(pred.size()));
            break;
        }
    }
    return row;
}

struct SuiteEntry {
    std::string dataset;  // registry name, or "self-generated"
    std::string display;
    RunSpec spec;
};

// The four module/dataset pairings of the benchmark table.
inline std::vector<SuiteEntry> default_suite() {
    return {
        {"seeds", "Seeds", {Algorithm::kmeans, 3, std::nullopt, std::string("variety")}},
        {"haberman", "Haberman", {Algorithm::logreg, std::nullopt, std::string("survival"), std::nullopt}},
        {"self-generated", "Self-generated", {Algorithm::linreg, std::nullopt, std::string("y"), std::nullopt}},
        {"iris", "Iris", {Algorithm::dtree, std::nullopt, std::nullopt, std::nullopt}},
    };
}

inline constexpr std::size_t self_generated_rows = 1000;
inline constexpr double self_generated_noise = 0.5;
inline constexpr std::uint64_t self_generated_seed = 42;

// ---- reports

inline const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols = {"Module Name", "Dataset", "Training (sec)",
                                                  "Test (sec)",  "Parameters", "Clicks"};
    return cols;
}

inline std::string format_secs(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", s);
    return buf;
}

inline std::vector<std::string> row_cells(const BenchRow& r) {
    return {r.module_name,
            r.dataset_name,
            format_secs(r.training_secs),
            r.test_secs ? format_secs(*r.test_secs) : "/",
            std::to_string(r.parameter_count),
            std::to_string(r.click_count)};
}

inline std::string text_report(const std::vector<std::vector<std::string>>& rows) {
    const auto& header = report_columns();
    std::vector<std::size_t> width(header.size());
    for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
    for (const auto& r : rows)
        for (std::size_t j = 0; j < r.size() && j < width.size(); ++j) width[j] = std::max(width[j], r[j].size());
    auto line = [&](const std::vector<std::string>& cells) {
        std::string out;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            out += cells[j];
            if (j + 1 < cells.size()) out += std::string(width[j] - cells[j].size() + 2, ' ');
        }
        return out + "\n";
    };
    std::string out = line(header);
    for (const auto& r : rows) out += line(r);
    return out;
}

inline std::string text_report(const std::vector<BenchRow>& rows) {
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) cells.push_back(row_cells(r));
    return text_report(cells);
}

inline std::string csv_report(const std::vector<BenchRow>& rows) {
    Dataset d{report_columns(), {}};
    for (const auto& r : rows) {
        std::vector<Cell> cells;
        for (auto& c : row_cells(r)) cells.emplace_back(std::move(c));
        d.rows.push_back(std::move(cells));
    }
    return codec::export_dataset(d, codec::ExportFormat::csv);
}

inline std::string text_report_from_csv(std::string_view csv) {
    const Dataset d = codec::parse_csv(csv);
    if (d.columns != report_columns()) throw Error(errc::schema, "not a benchmark report: unexpected header");
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : d.rows) {
        std::vector<std::string> cells;
        for (std::size_t j = 0; j < r.size(); ++j) {
            // the CSV reader turns "1.5000" into a number; keep the fixed width
            const bool secs = (j == 2 || j == 3) && std::holds_alternative<double>(r[j]);
            cells.push_back(secs ? format_secs(std::get<double>(r[j])) : cell_to_string(r[j]));
        }
        rows.push_back(std::move(cells));
    }
    return text_report(rows);
}

}  // namespace vanlearn::bench
