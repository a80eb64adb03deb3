#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "vanlearn/error.hpp"
#include "vanlearn/tensor.hpp"

namespace vanlearn {

// A cell is either a finite Number or a Text. Number-ness is decided per cell
// at parse time; a column is numeric iff every one of its cells is a Number.
using Cell = std::variant<double, std::string>;

inline bool is_number(const Cell& c) { return std::holds_alternative<double>(c); }

// Shortest decimal form that parses back to the identical double.
inline std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline std::string cell_to_string(const Cell& c) {
    if (const double* v = std::get_if<double>(&c)) return format_number(*v);
    return std::get<std::string>(c);
}

// True when `text` lexes as a finite decimal or scientific float. Surrounding
// spaces/tabs and a single leading '+' are tolerated.
inline bool lex_number(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
        if (!text.empty() && (text.front() == '-' || text.front() == '+')) return false;
    }
    if (text.empty()) return false;
    // from_chars would otherwise accept these spellings.
    for (char ch : text) {
        const bool ok = (ch >= '0' && ch <= '9') || ch == '.' || ch == '-' || ch == 'e' || ch == 'E' || ch == '+';
        if (!ok) return false;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, std::chars_format::general);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) return false;
    out = v;
    return true;
}

inline bool lexes_as_number(std::string_view text) {
    double ignored = 0.0;
    return lex_number(text, ignored);
}

struct Dataset {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::size_t row_count() const noexcept { return rows.size(); }
    std::size_t col_count() const noexcept { return columns.size(); }

    bool column_is_numeric(std::size_t j) const {
        return std::all_of(rows.begin(), rows.end(), [j](const auto& r) { return is_number(r[j]); });
    }

    // Throws E_EMPTY / E_DUP_COLUMN / E_RAGGED when the invariants do not hold.
    void check() const {
        std::unordered_set<std::string_view> seen;
        for (const auto& name : columns) {
            if (name.empty()) throw Error(errc::empty, "column names must be non-empty");
            if (!seen.insert(name).second) throw Error(errc::dup_column, "duplicate column name '" + name + "'");
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != columns.size())
                throw Error(errc::ragged, "row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                                              " cells, header has " + std::to_string(columns.size()));
        }
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Numeric matrix over the selected columns; E_SCHEMA if any selected cell is Text.
inline Matrix numeric_matrix(const Dataset& d, const std::vector<std::size_t>& cols) {
    std::vector<double> flat;
    flat.reserve(d.row_count() * cols.size());
    for (std::size_t i = 0; i < d.row_count(); ++i) {
        for (std::size_t j : cols) {
            const double* v = std::get_if<double>(&d.rows[i][j]);
            if (v == nullptr)
                throw Error(errc::schema, "non-numeric cell in column '" + d.columns[j] + "' at row " +
                                              std::to_string(i + 1));
            flat.push_back(*v);
        }
    }
    return Matrix(d.row_count(), cols.size(), std::move(flat));
}

inline Matrix numeric_matrix(const Dataset& d) {
    std::vector<std::size_t> all(d.col_count());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    return numeric_matrix(d, all);
}

// Total order used wherever labels must be ranked: Numbers before Text,
// Numbers by value, Text lexicographically by bytes.
inline bool cell_less(const Cell& a, const Cell& b) {
    if (a.index() != b.index()) return a.index() < b.index();
    if (is_number(a)) return std::get<double>(a) < std::get<double>(b);
    return std::get<std::string>(a) < std::get<std::string>(b);
}

}  // namespace vanlearn
