#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vanlearn/codec/utf8.hpp"
#include "vanlearn/codec/wire.hpp"
#include "vanlearn/ml/model_json.hpp"
#include "vanlearn/persistence/crypto.hpp"
#include "vanlearn/persistence/schema.hpp"
#include "vanlearn/persistence/sqlite.hpp"

namespace vanlearn::persistence {

// Milliseconds since the Unix epoch. Tests substitute a manual clock.
using Clock = std::function<std::int64_t()>;

inline std::int64_t system_clock_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

inline constexpr std::int64_t default_session_ttl_ms = 24LL * 3600 * 1000;

struct StoreOptions {
    std::string path;
    Clock clock = system_clock_ms;
    std::int64_t session_ttl_ms = default_session_ttl_ms;
    int password_iterations = persistence::password_iterations;
};

struct UserAccount {
    std::int64_t id = 0;
    std::string username;
    std::string password_hash;
    std::string email;
    std::int64_t created_at = 0;
};

struct SessionToken {
    std::string token;
    std::int64_t user_id = 0;
    std::int64_t expires_at = 0;
};

struct DatasetInfo {
    std::int64_t id = 0;
    std::int64_t owner_id = 0;
    std::string name;
    std::int64_t row_count = 0;
    std::int64_t col_count = 0;
    std::int64_t uploaded_at = 0;
};

struct StoredDataset {
    DatasetInfo info;
    std::string csv_bytes;
};

enum class ActionKind { signin, signup, upload, train, predict, download };

inline const char* to_string(ActionKind k) {
    switch (k) {
        case ActionKind::signin: return "signin";
        case ActionKind::signup: return "signup";
        case ActionKind::upload: return "upload";
        case ActionKind::train: return "train";
        case ActionKind::predict: return "predict";
        case ActionKind::download: return "download";
    }
    return "?";
}

inline ActionKind parse_action_kind(std::string_view s) {
    for (ActionKind k : {ActionKind::signin, ActionKind::signup, ActionKind::upload, ActionKind::train,
                         ActionKind::predict, ActionKind::download})
        if (s == to_string(k)) return k;
    throw Error(errc::storage, "unknown action kind in database: " + std::string(s));
}

struct ActionRecord {
    std::int64_t id = 0;
    std::int64_t user_id = 0;
    ActionKind kind = ActionKind::signin;
    std::string detail;
    std::int64_t at = 0;
};

struct StoredResult {
    std::int64_t id = 0;
    std::int64_t owner_id = 0;
    Algorithm algorithm = Algorithm::kmeans;
    ml::TrainedModel model;
    Dataset output;
    std::int64_t created_at = 0;
};

inline constexpr std::size_t username_min_chars = 3;
inline constexpr std::size_t username_max_chars = 32;
inline constexpr std::size_t password_min_chars = 8;

namespace detail {

inline std::size_t code_points(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

inline std::string encode_output(const Dataset& d) {
    return nlohmann::json{{"columns", d.columns}, {"wire", codec::encode_wire(d)}}.dump();
}

inline Dataset decode_output(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Dataset d;
    const auto wire = j.at("wire").get<std::string>();
    if (!wire.empty()) d = codec::decode_wire(wire);
    // Column order is stored separately so header-only tables survive and the
    // order does not depend on the first object's key order.
    const auto columns = j.at("columns").get<std::vector<std::string>>();
    if (d.rows.empty()) return Dataset{columns, {}};
    Dataset ordered{columns, {}};
    for (const auto& row : d.rows) {
        std::vector<Cell> r;
        for (const auto& c : columns) {
            std::size_t at = 0;
            while (at < d.columns.size() && d.columns[at] != c) ++at;
            if (at == d.columns.size()) throw Error(errc::storage, "stored output lost column " + c);
            r.push_back(row[at]);
        }
        ordered.rows.push_back(std::move(r));
    }
    return ordered;
}

}  // namespace detail

// One SQLite connection plus the account/session/dataset/action/result
// operations. Not meant to be shared across threads; the service keeps a pool
// of independent stores on the same file.
class Store {
public:
    explicit Store(StoreOptions opts) : opts_(std::move(opts)), db_(opts_.path) {
        if (opts_.path != ":memory:" && !opts_.path.empty()) db_.exec_script("PRAGMA journal_mode=WAL");
        db_.exec_script("PRAGMA foreign_keys=ON; PRAGMA synchronous=NORMAL;");
        db_.exec_script(schema_sql);
    }

    std::int64_t now() const { return opts_.clock(); }
    const Connection& connection() const { return db_; }

    // Groups several writes; rolls back if the returned object dies uncommitted.
    Transaction begin() const { return Transaction(db_); }

    std::vector<std::string> table_names() const {
        auto st = db_.prepare(
            "SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%' ORDER BY name");
        std::vector<std::string> out;
        while (st.step()) out.push_back(st.text(0));
        return out;
    }

    // ---- accounts

    UserAccount create_user(std::string_view username, std::string_view password, std::string_view email = {}) {
        check_username(username);
        if (codec::find_invalid_utf8(password) != std::string_view::npos ||
            detail::code_points(password) < password_min_chars)
            throw Error(errc::weak_password,
                        "password must be at least " + std::to_string(password_min_chars) + " characters");
        if (codec::find_invalid_utf8(email) != std::string_view::npos)
            throw Error(errc::encoding, "email is not valid UTF-8");

        UserAccount u;
        u.username = std::string(username);
        u.email = std::string(email);
        u.password_hash = hash_password(password, opts_.password_iterations);
        u.created_at = now();
        auto st = db_.prepare("INSERT INTO users (username, password_hash, email, created_at) VALUES (?, ?, ?, ?)");
        st.bind_all(u.username, u.password_hash, u.email, u.created_at);
        try {
            st.run();
        } catch (const Error& e) {
            if (e.code() == "E_CONSTRAINT") throw Error(errc::dup_username, "username already taken");
            throw;
        }
        u.id = db_.last_insert_id();
        return u;
    }

    std::optional<UserAccount> find_user(std::string_view username) const {
        auto st = db_.prepare("SELECT id, username, password_hash, email, created_at FROM users WHERE username = ?");
        st.bind(1, username);
        if (!st.step()) return std::nullopt;
        return read_user(st);
    }

    std::optional<UserAccount> find_user(std::int64_t id) const {
        auto st = db_.prepare("SELECT id, username, password_hash, email, created_at FROM users WHERE id = ?");
        st.bind(1, id);
        if (!st.step()) return std::nullopt;
        return read_user(st);
    }

    // Unknown user and wrong password both cost one full hash verification and
    // raise the same error.
    SessionToken authenticate(std::string_view username, std::string_view password) {
        const auto user = find_user(username);
        const bool ok = verify_password(password, user ? user->password_hash : dummy_hash());
        if (!user || !ok) throw Error(errc::auth, "invalid username or password");

        SessionToken s{base64_encode(random_bytes(16)), user->id, now() + opts_.session_ttl_ms};
        auto purge = db_.prepare("DELETE FROM sessions WHERE user_id = ? AND expires_at <= ?");
        purge.bind_all(user->id, now()).run();
        auto st = db_.prepare("INSERT INTO sessions (token_hash, user_id, expires_at) VALUES (?, ?, ?)");
        st.bind_all(sha256_hex(s.token), s.user_id, s.expires_at).run();
        return s;
    }

    // Resolves a live token and slides its expiry forward. Expired tokens are
    // deleted and resolve to nothing.
    std::optional<UserAccount> session_user(std::string_view token) {
        if (token.empty()) return std::nullopt;
        const std::string key = sha256_hex(token);
        std::int64_t user_id = 0, expires = 0;
        {
            // Finish the read before writing: an open read statement would
            // make the UPDATE an upgrade that WAL refuses under contention.
            auto st = db_.prepare("SELECT user_id, expires_at FROM sessions WHERE token_hash = ?");
            st.bind(1, key);
            if (!st.step()) return std::nullopt;
            user_id = st.int64(0);
            expires = st.int64(1);
        }
        const std::int64_t t = now();
        if (expires <= t) {
            revoke_session(token);
            return std::nullopt;
        }
        auto touch = db_.prepare("UPDATE sessions SET expires_at = ? WHERE token_hash = ?");
        touch.bind_all(t + opts_.session_ttl_ms, key).run();
        return find_user(user_id);
    }

    void revoke_session(std::string_view token) {
        auto st = db_.prepare("DELETE FROM sessions WHERE token_hash = ?");
        st.bind(1, sha256_hex(token)).run();
    }

    // ---- datasets

    DatasetInfo store_dataset(std::int64_t owner, std::string_view name, std::string_view csv_bytes,
                              std::int64_t rows, std::int64_t cols) {
        DatasetInfo info{0, owner, std::string(name), rows, cols, now()};
        auto st = db_.prepare(
            "INSERT INTO datasets (owner_id, name, csv_bytes, row_count, col_count, uploaded_at) "
            "VALUES (?, ?, ?, ?, ?, ?)");
        st.bind(1, owner).bind(2, info.name).bind_blob(3, csv_bytes).bind(4, rows).bind(5, cols).bind(6,
                                                                                                       info.uploaded_at);
        st.run();
        info.id = db_.last_insert_id();
        return info;
    }

    StoredDataset load_dataset(std::int64_t requester, std::int64_t id) const {
        auto st = db_.prepare(
            "SELECT id, owner_id, name, row_count, col_count, uploaded_at, csv_bytes FROM datasets WHERE id = ?");
        st.bind(1, id);
        if (!st.step()) throw Error(errc::not_found, "no dataset " + std::to_string(id));
        StoredDataset d{read_dataset_info(st), st.blob(6)};
        if (d.info.owner_id != requester) throw Error(errc::forbidden, "dataset belongs to another user");
        return d;
    }

    std::vector<DatasetInfo> list_datasets(std::int64_t owner) const {
        auto st = db_.prepare(
            "SELECT id, owner_id, name, row_count, col_count, uploaded_at FROM datasets WHERE owner_id = ? "
            "ORDER BY id");
        st.bind(1, owner);
        std::vector<DatasetInfo> out;
        while (st.step()) out.push_back(read_dataset_info(st));
        return out;
    }

    // ---- actions

    ActionRecord record_action(std::int64_t user, ActionKind kind, std::string_view detail) {
        ActionRecord a{0, user, kind, std::string(detail), now()};
        auto st = db_.prepare("INSERT INTO actions (user_id, kind, detail, at) VALUES (?, ?, ?, ?)");
        st.bind_all(user, std::string_view(to_string(kind)), a.detail, a.at).run();
        a.id = db_.last_insert_id();
        return a;
    }

    std::vector<ActionRecord> list_actions(std::int64_t user) const {
        auto st = db_.prepare("SELECT id, user_id, kind, detail, at FROM actions WHERE user_id = ? ORDER BY at, id");
        st.bind(1, user);
        std::vector<ActionRecord> out;
        while (st.step())
            out.push_back({st.int64(0), st.int64(1), parse_action_kind(st.text(2)), st.text(3), st.int64(4)});
        return out;
    }

    bool has_action(std::int64_t user, ActionKind kind, std::string_view detail) const {
        auto st = db_.prepare("SELECT 1 FROM actions WHERE user_id = ? AND kind = ? AND detail = ? LIMIT 1");
        st.bind_all(user, std::string_view(to_string(kind)), detail);
        return st.step();
    }

    // ---- results

    std::int64_t store_result(std::int64_t owner, const ml::TrainedModel& model, const Dataset& output) {
        auto st = db_.prepare(
            "INSERT INTO results (owner_id, algorithm, model_json, output_json, created_at) VALUES (?, ?, ?, ?, ?)");
        st.bind_all(owner, std::string_view(to_string(ml::algorithm_of(model))), ml::model_to_json(model).dump(),
                    detail::encode_output(output), now())
            .run();
        return db_.last_insert_id();
    }

    StoredResult load_result(std::int64_t requester, std::int64_t id) const {
        auto st = db_.prepare(
            "SELECT id, owner_id, algorithm, model_json, output_json, created_at FROM results WHERE id = ?");
        st.bind(1, id);
        if (!st.step()) throw Error(errc::not_found, "no result " + std::to_string(id));
        if (st.int64(1) != requester) throw Error(errc::forbidden, "result belongs to another user");
        try {
            return StoredResult{st.int64(0),
                                st.int64(1),
                                parse_algorithm(st.text(2)),
                                ml::model_from_json(nlohmann::json::parse(st.text(3))),
                                detail::decode_output(st.text(4)),
                                st.int64(5)};
        } catch (const nlohmann::json::exception& e) {
            throw Error(errc::storage, std::string("corrupt stored result: ") + e.what());
        }
    }

    static void check_username(std::string_view username) {
        if (codec::find_invalid_utf8(username) != std::string_view::npos)
            throw Error(errc::bad_username, "username is not valid UTF-8");
        const std::size_t n = detail::code_points(username);
        if (n < username_min_chars || n > username_max_chars)
            throw Error(errc::bad_username, "username must be " + std::to_string(username_min_chars) + " to " +
                                                std::to_string(username_max_chars) + " characters");
        for (unsigned char c : username)
            if (c < 0x20 || c == 0x7F) throw Error(errc::bad_username, "username contains control characters");
    }

private:
    static UserAccount read_user(const Statement& st) {
        return {st.int64(0), st.text(1), st.text(2), st.text(3), st.int64(4)};
    }

    static DatasetInfo read_dataset_info(const Statement& st) {
        return {st.int64(0), st.int64(1), st.text(2), st.int64(3), st.int64(4), st.int64(5)};
    }

    const std::string& dummy_hash() {
        if (dummy_hash_.empty()) dummy_hash_ = hash_password("unused dummy password", opts_.password_iterations);
        return dummy_hash_;
    }

    StoreOptions opts_;
    Connection db_;
    std::string dummy_hash_;
};

}  // namespace vanlearn::persistence
