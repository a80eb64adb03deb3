#pragma once

// Size and schema gatekeeping in front of the analysis core.
//
// Reports are plain data: every broken rule becomes one Violation so a client
// can show all of them at once. The violation codes are part of the public
// contract and must match the browser-side validator exactly.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vanlearn/algorithm.hpp"
#include "vanlearn/dataset.hpp"

namespace vanlearn {

namespace violation {
inline constexpr const char* bytes = "V_BYTES";
inline constexpr const char* rows = "V_ROWS";
inline constexpr const char* cols = "V_COLS";
inline constexpr const char* non_numeric = "V_NON_NUMERIC";
inline constexpr const char* target_range = "V_TARGET_RANGE";
inline constexpr const char* label_cardinality = "V_LABEL_CARDINALITY";
inline constexpr const char* too_few_rows = "V_TOO_FEW_ROWS";
inline constexpr const char* too_few_cols = "V_TOO_FEW_COLS";
}  // namespace violation

struct ValidationRules {
    std::size_t max_bytes = 2'097'152;
    std::size_t max_rows = 10'000;
    std::size_t max_cols = 100;
};

struct SchemaRequirement {
    Algorithm algorithm = Algorithm::kmeans;
    std::optional<std::size_t> target_column;  // linreg / logreg only
};

struct Violation {
    std::string code;
    std::string message;
    std::optional<std::size_t> row;  // 0-based data row (header excluded)
    std::optional<std::size_t> col;  // 0-based column

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }

    std::set<std::string> codes() const {
        std::set<std::string> out;
        for (const auto& v : violations) out.insert(v.code);
        return out;
    }

    void add(std::string code, std::string message, std::optional<std::size_t> row = std::nullopt,
             std::optional<std::size_t> col = std::nullopt) {
        violations.push_back({std::move(code), std::move(message), row, col});
    }

    void merge(const ValidationReport& other) {
        violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    }
};

// Located V_NON_NUMERIC entries beyond this many are folded into one summary.
inline constexpr std::size_t max_located_violations = 100;

inline ValidationReport validate_size(std::size_t byte_len, std::size_t rows, std::size_t cols,
                                      const ValidationRules& rules = {}) {
    ValidationReport r;
    if (byte_len > rules.max_bytes)
        r.add(violation::bytes, "dataset is " + std::to_string(byte_len) + " bytes; the limit is " +
                                    std::to_string(rules.max_bytes));
    if (rows > rules.max_rows)
        r.add(violation::rows,
              "dataset has " + std::to_string(rows) + " rows; the limit is " + std::to_string(rules.max_rows));
    if (cols > rules.max_cols)
        r.add(violation::cols,
              "dataset has " + std::to_string(cols) + " columns; the limit is " + std::to_string(rules.max_cols));
    return r;
}

namespace detail {

inline void check_numeric(const Dataset& d, std::size_t col_end, ValidationReport& r) {
    std::size_t located = 0;
    std::size_t folded = 0;
    for (std::size_t i = 0; i < d.row_count(); ++i) {
        for (std::size_t j = 0; j < col_end; ++j) {
            if (is_number(d.rows[i][j])) continue;
            if (located < max_located_violations) {
                const auto& text = std::get<std::string>(d.rows[i][j]);
                r.add(violation::non_numeric,
                      "row " + std::to_string(i + 1) + ", column '" + d.columns[j] + "': " +
                          (text.empty() ? std::string("empty cell") : "'" + text + "' is not a number"),
                      i, j);
                ++located;
            } else {
                ++folded;
            }
        }
    }
    if (folded > 0)
        r.add(violation::non_numeric, std::to_string(folded) + " further non-numeric cells not listed");
}

}  // namespace detail

inline ValidationReport validate_schema(const Dataset& d, const SchemaRequirement& req) {
    ValidationReport r;
    const std::size_t n = d.row_count();
    const std::size_t m = d.col_count();
    const bool regression = req.algorithm == Algorithm::linreg || req.algorithm == Algorithm::logreg;

    if (regression && !req.target_column) {
        r.add(violation::target_range, std::string(to_string(req.algorithm)) + " needs a target column");
    } else if (!regression && req.target_column) {
        r.add(violation::target_range, std::string(to_string(req.algorithm)) + " takes no target column");
    } else if (regression && *req.target_column >= m) {
        r.add(violation::target_range, "target column " + std::to_string(*req.target_column) +
                                           " is out of range (dataset has " + std::to_string(m) + " columns)");
    }

    switch (req.algorithm) {
        case Algorithm::kmeans:
            if (n < 1) r.add(violation::too_few_rows, "k-means needs at least 1 row");
            detail::check_numeric(d, m, r);
            break;
        case Algorithm::linreg:
        case Algorithm::logreg:
            if (n < 2) r.add(violation::too_few_rows, "regression needs at least 2 rows");
            detail::check_numeric(d, m, r);
            if (req.algorithm == Algorithm::logreg && req.target_column && *req.target_column < m) {
                const std::size_t t = *req.target_column;
                std::vector<Cell> distinct;
                for (const auto& row : d.rows) {
                    bool seen = false;
                    for (const auto& c : distinct) seen = seen || c == row[t];
                    if (!seen) distinct.push_back(row[t]);
                    if (distinct.size() > 2) break;
                }
                if (distinct.size() != 2)
                    r.add(violation::label_cardinality,
                          "logistic regression needs exactly 2 distinct values in column '" + d.columns[t] + "', found " +
                              (distinct.size() > 2 ? std::string("more than 2") : std::to_string(distinct.size())),
                          std::nullopt, t);
            }
            break;
        case Algorithm::dtree:
            if (n < 1) r.add(violation::too_few_rows, "decision tree needs at least 1 row");
            if (m < 2) r.add(violation::too_few_cols, "decision tree needs at least 2 columns (features + output)");
            if (m >= 1) detail::check_numeric(d, m - 1, r);
            break;
    }
    return r;
}

// A rejected input together with its full report. The service answers it
// with 400 (413 when V_BYTES is among the violations).
class ValidationFailed : public Error {
public:
    explicit ValidationFailed(ValidationReport r)
        : Error("E_VALIDATION", summarize(r)), report_(std::move(r)) {}

    const ValidationReport& report() const noexcept { return report_; }

private:
    static std::string summarize(const ValidationReport& r) {
        std::string msg = std::to_string(r.violations.size()) + " validation problem(s)";
        if (!r.violations.empty()) msg += ": " + r.violations.front().message;
        return msg;
    }

    ValidationReport report_;
};

}  // namespace vanlearn
