#pragma once

// Thin RAII layer over the SQLite C API. Statements only ever receive values
// through bind(); SQL text is always a compile-time literal.

#include <sqlite3.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "vanlearn/error.hpp"

namespace vanlearn::persistence {

class Statement {
public:
    Statement(sqlite3* db, std::string_view sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) != SQLITE_OK)
            throw Error(errc::storage, std::string("prepare failed: ") + sqlite3_errmsg(db));
    }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;
    ~Statement() { sqlite3_finalize(stmt_); }

    Statement& bind(int idx, std::int64_t v) {
        check(sqlite3_bind_int64(stmt_, idx, v));
        return *this;
    }
    Statement& bind(int idx, std::string_view v) {
        check(sqlite3_bind_text(stmt_, idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
        return *this;
    }
    Statement& bind_blob(int idx, std::string_view v) {
        check(sqlite3_bind_blob(stmt_, idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
        return *this;
    }

    template <typename... Args>
    Statement& bind_all(Args&&... args) {
        int idx = 1;
        (bind(idx++, std::forward<Args>(args)), ...);
        return *this;
    }

    // True while a row is available.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        if (rc == SQLITE_CONSTRAINT)
            throw Error("E_CONSTRAINT", std::string("constraint violated: ") + sqlite3_errmsg(db_));
        throw Error(errc::storage, std::string("step failed: ") + sqlite3_errmsg(db_));
    }

    void run() {
        while (step()) {
        }
    }

    std::int64_t int64(int col) const { return sqlite3_column_int64(stmt_, col); }

    std::string text(int col) const {
        const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
        return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
    }

    std::string blob(int col) const {
        const auto* p = static_cast<const char*>(sqlite3_column_blob(stmt_, col));
        return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
    }

private:
    void check(int rc) const {
        if (rc != SQLITE_OK) throw Error(errc::storage, std::string("bind failed: ") + sqlite3_errmsg(db_));
    }

    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

class Connection {
public:
    explicit Connection(const std::string& path) {
        if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                            nullptr) != SQLITE_OK) {
            std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
            sqlite3_close(db_);
            throw Error(errc::storage, "cannot open database '" + path + "': " + msg);
        }
        sqlite3_busy_timeout(db_, 10'000);
    }
    Connection(const Connection&) = delete;
    Connection& operator=(const Connection&) = delete;
    ~Connection() { sqlite3_close(db_); }

    sqlite3* handle() const noexcept { return db_; }

    Statement prepare(std::string_view sql) const { return Statement(db_, sql); }

    // Multi-statement script with no bound values (schema, pragmas).
    void exec_script(const char* sql) const {
        char* err = nullptr;
        if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
            std::string msg = err ? err : "unknown error";
            sqlite3_free(err);
            throw Error(errc::storage, "script failed: " + msg);
        }
    }

    std::int64_t last_insert_id() const { return sqlite3_last_insert_rowid(db_); }

private:
    sqlite3* db_ = nullptr;
};

// Rolls back unless commit() was reached.
class Transaction {
public:
    explicit Transaction(const Connection& c) : c_(c) { c_.exec_script("BEGIN IMMEDIATE"); }
    Transaction(const Transaction&) = delete;
    Transaction& operator=(const Transaction&) = delete;
    ~Transaction() {
        if (!done_) {
            try {
                c_.exec_script("ROLLBACK");
            } catch (...) {
            }
        }
    }

    void commit() {
        c_.exec_script("COMMIT");
        done_ = true;
    }

private:
    const Connection& c_;
    bool done_ = false;
};

}  // namespace vanlearn::persistence
