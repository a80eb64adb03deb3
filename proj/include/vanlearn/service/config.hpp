#pragma once

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "vanlearn/error.hpp"
#include "vanlearn/persistence/crypto.hpp"
#include "vanlearn/validator.hpp"

namespace vanlearn::service {

enum class CaptchaMode { off, stub, real };

inline CaptchaMode parse_captcha_mode(std::string_view s) {
    if (s == "off") return CaptchaMode::off;
    if (s == "stub") return CaptchaMode::stub;
    if (s == "real") return CaptchaMode::real;
    throw Error(errc::argument, "VANLEARN_CAPTCHA must be off, stub or real, got '" + std::string(s) + "'");
}

struct ServiceConfig {
    std::string host = "0.0.0.0";
    int port = 8080;
    std::string db_path = "vanlearn.db";
    CaptchaMode captcha = CaptchaMode::off;
    std::string captcha_secret;
    ValidationRules rules;
    std::chrono::milliseconds fit_timeout{60'000};
    std::size_t max_concurrent_fits = 2;
    std::size_t worker_threads = std::max(4u, std::thread::hardware_concurrency());
    int password_iterations = persistence::password_iterations;
    std::string static_dir;  // optional; served at / when set (web client assets)

    // Reads VANLEARN_* variables over the defaults. `getenv` is injectable so
    // tests do not touch the process environment.
    static ServiceConfig from_env(const std::function<const char*(const char*)>& getenv = ::getenv) {
        ServiceConfig c;
        auto str = [&](const char* name) -> std::optional<std::string> {
            const char* v = getenv(name);
            if (v == nullptr || *v == '\0') return std::nullopt;
            return std::string(v);
        };
        auto num = [&](const char* name, std::size_t lo, std::size_t hi) -> std::optional<std::size_t> {
            const auto v = str(name);
            if (!v) return std::nullopt;
            std::size_t out = 0;
            auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
            if (ec != std::errc{} || p != v->data() + v->size() || out < lo || out > hi)
                throw Error(errc::argument, std::string(name) + " must be an integer in [" + std::to_string(lo) +
                                                ", " + std::to_string(hi) + "], got '" + *v + "'");
            return out;
        };
        if (auto v = num("VANLEARN_PORT", 0, 65535)) c.port = static_cast<int>(*v);
        if (auto v = str("VANLEARN_HOST")) c.host = *v;
        if (auto v = str("VANLEARN_DB_PATH")) c.db_path = *v;
        if (auto v = str("VANLEARN_CAPTCHA")) c.captcha = parse_captcha_mode(*v);
        if (auto v = str("VANLEARN_CAPTCHA_SECRET")) c.captcha_secret = *v;
        if (auto v = num("VANLEARN_MAX_BYTES", 1, std::size_t{1} << 34)) c.rules.max_bytes = *v;
        if (auto v = num("VANLEARN_MAX_ROWS", 1, std::size_t{1} << 32)) c.rules.max_rows = *v;
        if (auto v = num("VANLEARN_MAX_COLS", 1, std::size_t{1} << 20)) c.rules.max_cols = *v;
        if (auto v = num("VANLEARN_FIT_TIMEOUT_SECS", 1, 86'400)) c.fit_timeout = std::chrono::seconds(*v);
        if (auto v = num("VANLEARN_MAX_FITS", 1, 1024)) c.max_concurrent_fits = *v;
        if (auto v = str("VANLEARN_STATIC_DIR")) c.static_dir = *v;
        if (c.captcha == CaptchaMode::real && c.captcha_secret.empty())
            throw Error(errc::argument, "VANLEARN_CAPTCHA=real needs VANLEARN_CAPTCHA_SECRET");
        return c;
    }
};

}  // namespace vanlearn::service
