#pragma once

#include <memory>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "vanlearn/service/config.hpp"

namespace vanlearn::service {

class CaptchaVerifier {
public:
    virtual ~CaptchaVerifier() = default;
    virtual bool verify(const std::string& token, const std::string& client_ip) = 0;
};

// Accepts exactly "test-ok".
class StubCaptcha final : public CaptchaVerifier {
public:
    static constexpr const char* accepted_token = "test-ok";
    bool verify(const std::string& token, const std::string&) override { return token == accepted_token; }
};

// Google reCAPTCHA siteverify. Network or parse failures reject the request.
class RecaptchaVerifier final : public CaptchaVerifier {
public:
    explicit RecaptchaVerifier(std::string secret, std::string host = "www.google.com")
        : secret_(std::move(secret)), host_(std::move(host)) {}

    bool verify(const std::string& token, const std::string& client_ip) override {
        if (token.empty()) return false;
        httplib::SSLClient cli(host_);
        cli.set_connection_timeout(5);
        cli.set_read_timeout(5);
        httplib::Params form{{"secret", secret_}, {"response", token}};
        if (!client_ip.empty()) form.emplace("remoteip", client_ip);
        auto res = cli.Post("/recaptcha/api/siteverify", form);
        if (!res || res->status != 200) return false;
        const auto j = nlohmann::json::parse(res->body, nullptr, false);
        return j.is_object() && j.value("success", false) == true;
    }

private:
    std::string secret_;
    std::string host_;
};

inline std::unique_ptr<CaptchaVerifier> make_captcha(const ServiceConfig& c) {
    switch (c.captcha) {
        case CaptchaMode::off: return nullptr;
        case CaptchaMode::stub: return std::make_unique<StubCaptcha>();
        case CaptchaMode::real: return std::make_unique<RecaptchaVerifier>(c.captcha_secret);
    }
    return nullptr;
}

}  // namespace vanlearn::service
