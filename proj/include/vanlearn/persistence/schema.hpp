#pragma once

// Mirrors db/schema.sql byte for byte; test_persistence checks the two agree.

namespace vanlearn::persistence {

inline constexpr const char* schema_sql = R"SQL(-- vanlearn relational schema. Applied idempotently on every connection open.

CREATE TABLE IF NOT EXISTS users (
    id            INTEGER PRIMARY KEY AUTOINCREMENT,
    username      TEXT    NOT NULL UNIQUE,
    password_hash TEXT    NOT NULL,
    email         TEXT    NOT NULL DEFAULT '',
    created_at    INTEGER NOT NULL
);

-- token_hash is the sha256 of the bearer token; the raw token is never stored.
CREATE TABLE IF NOT EXISTS sessions (
    token_hash TEXT    PRIMARY KEY,
    user_id    INTEGER NOT NULL REFERENCES users(id) ON DELETE CASCADE,
    expires_at INTEGER NOT NULL
);

CREATE TABLE IF NOT EXISTS datasets (
    id          INTEGER PRIMARY KEY AUTOINCREMENT,
    owner_id    INTEGER NOT NULL REFERENCES users(id) ON DELETE CASCADE,
    name        TEXT    NOT NULL,
    csv_bytes   BLOB    NOT NULL,
    row_count   INTEGER NOT NULL,
    col_count   INTEGER NOT NULL,
    uploaded_at INTEGER NOT NULL
);

CREATE TABLE IF NOT EXISTS actions (
    id      INTEGER PRIMARY KEY AUTOINCREMENT,
    user_id INTEGER NOT NULL REFERENCES users(id) ON DELETE CASCADE,
    kind    TEXT    NOT NULL CHECK (kind IN ('signin', 'signup', 'upload', 'train', 'predict', 'download')),
    detail  TEXT    NOT NULL,
    at      INTEGER NOT NULL
);

-- output_json holds {"columns": [...], "wire": "<row objects>"}.
CREATE TABLE IF NOT EXISTS results (
    id          INTEGER PRIMARY KEY AUTOINCREMENT,
    owner_id    INTEGER NOT NULL REFERENCES users(id) ON DELETE CASCADE,
    algorithm   TEXT    NOT NULL,
    model_json  TEXT    NOT NULL,
    output_json TEXT    NOT NULL,
    created_at  INTEGER NOT NULL
);

CREATE INDEX IF NOT EXISTS datasets_owner ON datasets(owner_id);
CREATE INDEX IF NOT EXISTS actions_user ON actions(user_id, at);
CREATE INDEX IF NOT EXISTS results_owner ON results(owner_id);
)SQL";

inline constexpr const char* table_list[] = {"users", "sessions", "datasets", "actions", "results"};

}  // namespace vanlearn::persistence
