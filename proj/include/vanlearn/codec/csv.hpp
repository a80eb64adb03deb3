#pragma once

// RFC 4180 reader and the csv/txt download serializers.
//
// The header record is mandatory. Records end at LF, CRLF or a bare CR; a
// newline right before end of input does not open an extra record, and
// completely blank lines are skipped. Each cell
// becomes a Number when it lexes as a finite float (quoted or not), otherwise
// Text.

#include <string>
#include <string_view>
#include <vector>

#include "vanlearn/codec/utf8.hpp"
#include "vanlearn/dataset.hpp"
#include "vanlearn/error.hpp"

namespace vanlearn::codec {

inline constexpr const char* csv_syntax = "E_CSV_SYNTAX";

namespace detail {

inline std::vector<std::vector<std::string>> split_records(std::string_view in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;  // current field was quoted, so it exists even if empty
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = in.size();

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        quoted = false;
    };
    auto end_record = [&] {
        // Completely blank lines carry no record.
        const bool blank = record.empty() && field.empty() && !quoted;
        if (!blank) {
            end_field();
            records.push_back(std::move(record));
        }
        record.clear();
        ++line;
    };

    while (i < n) {
        const char c = in[i];
        if (c == '"' && field.empty() && !quoted) {
            ++i;
            quoted = true;
            bool closed = false;
            while (i < n) {
                if (in[i] == '"') {
                    if (i + 1 < n && in[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                    } else {
                        ++i;
                        closed = true;
                        break;
                    }
                } else {
                    if (in[i] == '\n') ++line;
                    field.push_back(in[i++]);
                }
            }
            if (!closed) throw Error(csv_syntax, "unterminated quoted field starting on line " + std::to_string(line));
            if (i < n && in[i] != ',' && in[i] != '\n' && in[i] != '\r')
                throw Error(csv_syntax, "unexpected character after closing quote on line " + std::to_string(line));
            continue;
        }
        if (c == ',') {
            end_field();
            ++i;
        } else if (c == '\n' || c == '\r') {
            end_record();
            i += (c == '\r' && i + 1 < n && in[i + 1] == '\n') ? 2 : 1;
        } else {
            field.push_back(c);
            ++i;
        }
    }
    end_record();
    return records;
}

inline bool needs_quotes(std::string_view s) {
    if (s.empty()) return true;
    return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void append_csv_field(std::string& out, std::string_view s) {
    if (!needs_quotes(s)) {
        out.append(s);
        return;
    }
    out.push_back('"');
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

inline void append_txt_field(std::string& out, std::string_view s) {
    for (char c : s) {
        switch (c) {
            case '\\': out.append("\\\\"); break;
            case '\t': out.append("\\t"); break;
            case '\n': out.append("\\n"); break;
            case '\r': out.append("\\r"); break;
            default: out.push_back(c);
        }
    }
}

}  // namespace detail

inline Dataset parse_csv(std::string_view bytes) {
    if (bytes.starts_with("\xEF\xBB\xBF")) bytes.remove_prefix(3);
    if (auto bad = find_invalid_utf8(bytes); bad != std::string_view::npos)
        throw Error(errc::encoding, "input is not valid UTF-8 (byte offset " + std::to_string(bad) + ")");

    auto records = detail::split_records(bytes);
    if (records.empty()) throw Error(errc::empty, "CSV has no header row");

    Dataset d;
    d.columns = std::move(records.front());
    d.rows.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        auto& fields = records[r];
        if (fields.size() != d.columns.size())
            throw Error(errc::ragged, "record " + std::to_string(r + 1) + " has " + std::to_string(fields.size()) +
                                          " fields, header has " + std::to_string(d.columns.size()));
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (auto& f : fields) {
            double v = 0.0;
            if (lex_number(f, v))
                row.emplace_back(v);
            else
                row.emplace_back(std::move(f));
        }
        d.rows.push_back(std::move(row));
    }
    d.check();
    return d;
}

enum class ExportFormat { csv, txt };

inline ExportFormat parse_export_format(std::string_view name) {
    if (name == "csv") return ExportFormat::csv;
    if (name == "txt") return ExportFormat::txt;
    throw Error(errc::format, "unsupported export format '" + std::string(name) + "' (use csv or txt)");
}

inline const char* content_type(ExportFormat f) {
    return f == ExportFormat::csv ? "text/csv; charset=utf-8" : "text/plain; charset=utf-8";
}

// csv: RFC 4180 with header, LF line endings. txt: header + tab-separated,
// with backslash escapes for tab, newline, CR and backslash inside cells.
inline std::string export_dataset(const Dataset& d, ExportFormat format) {
    std::string out;
    const char sep = format == ExportFormat::csv ? ',' : '\t';
    auto put = [&](std::string_view s) {
        if (format == ExportFormat::csv)
            detail::append_csv_field(out, s);
        else
            detail::append_txt_field(out, s);
    };
    for (std::size_t j = 0; j < d.columns.size(); ++j) {
        if (j) out.push_back(sep);
        put(d.columns[j]);
    }
    out.push_back('\n');
    for (const auto& row : d.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out.push_back(sep);
            if (const double* v = std::get_if<double>(&row[j]))
                out.append(format_number(*v));
            else
                put(std::get<std::string>(row[j]));
        }
        out.push_back('\n');
    }
    return out;
}

inline std::string export_dataset(const Dataset& d, std::string_view format) {
    return export_dataset(d, parse_export_format(format));
}

}  // namespace vanlearn::codec
