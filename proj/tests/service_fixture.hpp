#pragma once

// Runs a real Server on an ephemeral localhost port against a throwaway
// database file.

#include <atomic>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>

#include <unistd.h>

#include "vanlearn/service/server.hpp"

namespace fixture {

inline std::filesystem::path temp_db_path() {
    static std::atomic<int> counter{0};
    return std::filesystem::temp_directory_path() /
           ("vanlearn-svc-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".db");
}

inline vanlearn::service::ServiceConfig test_config() {
    vanlearn::service::ServiceConfig c;
    c.host = "127.0.0.1";
    c.port = 0;
    c.db_path = temp_db_path().string();
    c.password_iterations = 2000;
    c.worker_threads = 8;
    return c;
}

class LiveServer {
public:
    explicit LiveServer(vanlearn::service::ServiceConfig cfg = test_config(),
                        std::unique_ptr<vanlearn::service::CaptchaVerifier> captcha = nullptr)
        : db_(cfg.db_path), server_(std::make_unique<vanlearn::service::Server>(cfg, vanlearn::persistence::system_clock_ms,
                                                                                std::move(captcha))) {
        port_ = server_->bind();
        if (port_ <= 0) throw std::runtime_error("could not bind test server");
        thread_ = std::thread([this] { server_->listen_after_bind(); });
        server_->http().wait_until_ready();
    }

    ~LiveServer() {
        server_->stop();
        thread_.join();
        server_.reset();
        for (const char* suffix : {"", "-wal", "-shm"}) std::filesystem::remove(db_ + suffix);
    }

    int port() const { return port_; }
    const std::string& db_path() const { return db_; }

    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(120);
        return c;
    }

private:
    std::string db_;
    std::unique_ptr<vanlearn::service::Server> server_;
    int port_ = -1;
    std::thread thread_;
};

inline nlohmann::json body_json(const httplib::Result& r) {
    if (!r) throw std::runtime_error("HTTP request failed: " + httplib::to_string(r.error()));
    return nlohmann::json::parse(r->body);
}

inline httplib::Headers bearer(const std::string& token) { return {{"Authorization", "Bearer " + token}}; }

inline httplib::Result post_json(httplib::Client& c, const std::string& path, const nlohmann::json& body,
                                 const httplib::Headers& h = {}) {
    return c.Post(path, h, body.dump(), "application/json");
}

// signup + signin; returns the bearer token.
inline std::string register_user(httplib::Client& c, const std::string& user, const std::string& pw = "password1") {
    auto r = post_json(c, "/api/auth/signup", {{"username", user}, {"password", pw}});
    if (!r || r->status != 201) throw std::runtime_error("signup failed: " + (r ? r->body : std::string("no response")));
    r = post_json(c, "/api/auth/signin", {{"username", user}, {"password", pw}});
    if (!r || r->status != 200) throw std::runtime_error("signin failed");
    return nlohmann::json::parse(r->body).at("token").get<std::string>();
}

}  // namespace fixture
