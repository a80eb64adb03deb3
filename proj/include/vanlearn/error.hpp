#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vanlearn {

// Every failure carries a stable code string (E_RAGGED, E_SHAPE, ...) that the
// service layer forwards to clients unchanged.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
inline constexpr const char* ragged = "E_RAGGED";
inline constexpr const char* non_finite = "E_NON_FINITE";
inline constexpr const char* shape = "E_SHAPE";
inline constexpr const char* empty = "E_EMPTY";
inline constexpr const char* too_few_rows = "E_TOO_FEW_ROWS";
inline constexpr const char* degenerate = "E_DEGENERATE";
inline constexpr const char* label_cardinality = "E_LABEL_CARDINALITY";
inline constexpr const char* schema = "E_SCHEMA";
inline constexpr const char* encoding = "E_ENCODING";
inline constexpr const char* dup_column = "E_DUP_COLUMN";
inline constexpr const char* wire_syntax = "E_WIRE_SYNTAX";
inline constexpr const char* key_mismatch = "E_KEY_MISMATCH";
inline constexpr const char* format = "E_FORMAT";
inline constexpr const char* argument = "E_ARG";
inline constexpr const char* timeout = "E_TIMEOUT";
inline constexpr const char* dup_username = "E_DUP_USERNAME";
inline constexpr const char* weak_password = "E_WEAK_PASSWORD";
inline constexpr const char* bad_username = "E_BAD_USERNAME";
inline constexpr const char* auth = "E_AUTH";
inline constexpr const char* not_found = "E_NOT_FOUND";
inline constexpr const char* forbidden = "E_FORBIDDEN";
inline constexpr const char* storage = "E_STORAGE";
inline constexpr const char* network = "E_NETWORK";
inline constexpr const char* checksum = "E_CHECKSUM";
}  // namespace errc

}  // namespace vanlearn
