#pragma once

// Client <-> server wire string: one flat JSON object per row, rows joined by
// top-level commas, e.g.  {"a":1,"b":"x"},{"a":2,"b":"y"}
//
// Keys are column names; values are JSON numbers (Number cells) or JSON
// strings (Text cells). The decoder is a single left-to-right pass. Separator
// commas are recognised purely by position (after a closing brace, outside any
// string literal), so commas inside objects and strings never split rows.

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vanlearn/codec/utf8.hpp"
#include "vanlearn/dataset.hpp"
#include "vanlearn/error.hpp"

namespace vanlearn::codec {

namespace detail {

inline void append_json_string(std::string& out, std::string_view s) {
    static constexpr char hex[] = "0123456789abcdef";
    out.push_back('"');
    for (char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        switch (c) {
            case '"': out.append("\\\""); break;
            case '\\': out.append("\\\\"); break;
            case '\b': out.append("\\b"); break;
            case '\f': out.append("\\f"); break;
            case '\n': out.append("\\n"); break;
            case '\r': out.append("\\r"); break;
            case '\t': out.append("\\t"); break;
            default:
                if (c < 0x20) {
                    out.append("\\u00");
                    out.push_back(hex[c >> 4]);
                    out.push_back(hex[c & 0xF]);
                } else {
                    out.push_back(ch);
                }
        }
    }
    out.push_back('"');
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

class WireReader {
public:
    explicit WireReader(std::string_view text) : s_(text) {}

    Dataset read() {
        skip_ws();
        if (at_end()) throw Error(errc::empty, "wire payload is empty");

        Dataset d;
        std::unordered_map<std::string, std::size_t> index;
        std::vector<Cell> row;
        std::vector<bool> filled;

        for (;;) {
            read_object(d, index, row, filled);
            d.rows.push_back(std::move(row));
            skip_ws();
            if (at_end()) break;
            expect(',', "',' between row objects");
            skip_ws();
        }
        return d;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(errc::wire_syntax, "wire payload: " + what + " at offset " + std::to_string(pos_));
    }

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[pos_]; }

    void skip_ws() {
        while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) ++pos_;
    }

    void expect(char c, const char* what) {
        if (peek() != c) fail(std::string("expected ") + what);
        ++pos_;
    }

    void read_object(Dataset& d, std::unordered_map<std::string, std::size_t>& index, std::vector<Cell>& row,
                     std::vector<bool>& filled) {
        const bool first = d.rows.empty();
        expect('{', "'{' opening a row object");
        row.assign(d.columns.size(), Cell{});
        filled.assign(d.columns.size(), false);
        std::size_t members = 0;

        skip_ws();
        if (peek() == '}') {
            ++pos_;
        } else {
            for (;;) {
                skip_ws();
                std::string key = read_string();
                skip_ws();
                expect(':', "':' after key");
                skip_ws();
                Cell value = read_value();

                std::size_t slot = 0;
                if (first) {
                    auto [it, inserted] = index.emplace(key, d.columns.size());
                    if (!inserted) fail("duplicate key '" + key + "'");
                    d.columns.push_back(std::move(key));
                    row.push_back(std::move(value));
                    filled.push_back(true);
                } else {
                    auto it = index.find(key);
                    if (it == index.end())
                        throw Error(errc::key_mismatch, "row " + std::to_string(d.rows.size() + 1) +
                                                            " has key '" + key + "' absent from the first row");
                    slot = it->second;
                    if (filled[slot]) fail("duplicate key '" + key + "'");
                    filled[slot] = true;
                    row[slot] = std::move(value);
                }
                ++members;

                skip_ws();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                expect('}', "',' or '}' inside a row object");
                break;
            }
        }
        if (first && d.columns.empty()) fail("row object has no keys");
        if (members != d.columns.size())
            throw Error(errc::key_mismatch, "row " + std::to_string(d.rows.size() + 1) + " has " +
                                                std::to_string(members) + " keys, first row has " +
                                                std::to_string(d.columns.size()));
    }

    Cell read_value() {
        const char c = peek();
        if (c == '"') return read_string();
        if (c == '-' || (c >= '0' && c <= '9')) return read_number();
        fail("expected a string or number value");
    }

    double read_number() {
        // JSON number grammar: -?(0|[1-9]d*)(.d+)?([eE][+-]?d+)?
        const std::size_t start = pos_;
        auto digits = [&] {
            const std::size_t from = pos_;
            while (!at_end() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
            return pos_ - from;
        };
        if (peek() == '-') ++pos_;
        if (peek() == '0') {
            ++pos_;
        } else if (digits() == 0) {
            fail("malformed number");
        }
        if (peek() == '.') {
            ++pos_;
            if (digits() == 0) fail("malformed number fraction");
        }
        if (peek() == 'e' || peek() == 'E') {
            ++pos_;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (digits() == 0) fail("malformed number exponent");
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (ec != std::errc{} || ptr != s_.data() + pos_) fail("number out of range");
        return v;
    }

    std::uint32_t read_hex4() {
        if (pos_ + 4 > s_.size()) fail("truncated \\u escape");
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) {
            const char h = s_[pos_++];
            v <<= 4;
            if (h >= '0' && h <= '9')
                v |= static_cast<std::uint32_t>(h - '0');
            else if (h >= 'a' && h <= 'f')
                v |= static_cast<std::uint32_t>(h - 'a' + 10);
            else if (h >= 'A' && h <= 'F')
                v |= static_cast<std::uint32_t>(h - 'A' + 10);
            else
                fail("bad hex digit in \\u escape");
        }
        return v;
    }

    std::string read_string() {
        expect('"', "string literal");
        std::string out;
        for (;;) {
            if (at_end()) fail("unterminated string");
            const char c = s_[pos_++];
            if (c == '"') break;
            if (static_cast<unsigned char>(c) < 0x20) fail("raw control character in string");
            if (c != '\\') {
                out.push_back(c);
                continue;
            }
            if (at_end()) fail("unterminated escape");
            switch (s_[pos_++]) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case '/': out.push_back('/'); break;
                case 'b': out.push_back('\b'); break;
                case 'f': out.push_back('\f'); break;
                case 'n': out.push_back('\n'); break;
                case 'r': out.push_back('\r'); break;
                case 't': out.push_back('\t'); break;
                case 'u': {
                    std::uint32_t cp = read_hex4();
                    if (cp >= 0xD800 && cp <= 0xDBFF) {
                        if (s_.substr(pos_, 2) != "\\u") fail("unpaired surrogate");
                        pos_ += 2;
                        const std::uint32_t lo = read_hex4();
                        if (lo < 0xDC00 || lo > 0xDFFF) fail("unpaired surrogate");
                        cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                    } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
                        fail("unpaired surrogate");
                    }
                    append_utf8(out, cp);
                    break;
                }
                default: fail("unknown escape");
            }
        }
        return out;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string encode_wire(const Dataset& d) {
    std::string out;
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        if (i) out.push_back(',');
        out.push_back('{');
        for (std::size_t j = 0; j < d.columns.size(); ++j) {
            if (j) out.push_back(',');
            detail::append_json_string(out, d.columns[j]);
            out.push_back(':');
            if (const double* v = std::get_if<double>(&d.rows[i][j]))
                out.append(format_number(*v));
            else
                detail::append_json_string(out, std::get<std::string>(d.rows[i][j]));
        }
        out.push_back('}');
    }
    return out;
}

inline Dataset decode_wire(std::string_view text) {
    if (auto bad = find_invalid_utf8(text); bad != std::string_view::npos)
        throw Error(errc::encoding, "wire payload is not valid UTF-8 (byte offset " + std::to_string(bad) + ")");
    Dataset d = detail::WireReader(text).read();
    d.check();
    return d;
}

}  // namespace vanlearn::codec
