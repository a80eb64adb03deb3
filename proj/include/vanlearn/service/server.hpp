#pragma once

#include <charconv>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "vanlearn/codec/csv.hpp"
#include "vanlearn/codec/wire.hpp"
#include "vanlearn/persistence/store.hpp"
#include "vanlearn/service/analysis.hpp"
#include "vanlearn/service/captcha.hpp"
#include "vanlearn/service/config.hpp"

namespace vanlearn::service {

inline constexpr const char* session_cookie = "vanlearn_session";

// An error with an explicit HTTP status, for cases the code table below does
// not decide on its own (fit failures are 422 whatever their code).
struct HttpError : std::runtime_error {
    int status;
    std::string code;
    HttpError(int s, std::string c, const std::string& msg) : std::runtime_error(msg), status(s), code(std::move(c)) {}
};

inline int status_for(std::string_view code) {
    static const std::pair<std::string_view, int> table[] = {
        {"E_AUTH", 401},          {"E_FORBIDDEN", 403},        {"E_NOT_FOUND", 404},
        {"E_DUP_USERNAME", 409},  {"E_TIMEOUT", 504},          {"E_STORAGE", 500},
        {"E_SHAPE", 422},         {"E_TOO_FEW_ROWS", 422},     {"E_DEGENERATE", 422},
        {"E_LABEL_CARDINALITY", 422}, {"E_SCHEMA", 422},       {"E_NON_FINITE", 422},
        {"E_ARG", 422},           {"E_MODEL_FORMAT", 500},
    };
    for (const auto& [c, s] : table)
        if (c == code) return s;
    return 400;  // request, parse, format and validation errors
}

inline json error_body(std::string_view code, std::string_view message) {
    return json{{"code", code}, {"message", message}};
}

// Independent SQLite connections on one database file, handed out per request.
class StorePool {
public:
    explicit StorePool(persistence::StoreOptions opts) : opts_(std::move(opts)) { release(acquire_raw()); }

    class Lease {
    public:
        Lease(StorePool& p, std::unique_ptr<persistence::Store> s) : pool_(p), store_(std::move(s)) {}
        Lease(const Lease&) = delete;
        Lease& operator=(const Lease&) = delete;
        ~Lease() { pool_.release(std::move(store_)); }
        persistence::Store* operator->() const { return store_.get(); }
        persistence::Store& operator*() const { return *store_; }

    private:
        StorePool& pool_;
        std::unique_ptr<persistence::Store> store_;
    };

    Lease acquire() { return Lease(*this, acquire_raw()); }

private:
    std::unique_ptr<persistence::Store> acquire_raw() {
        {
            std::lock_guard lock(mu_);
            if (!idle_.empty()) {
                auto s = std::move(idle_.back());
                idle_.pop_back();
                return s;
            }
        }
        return std::make_unique<persistence::Store>(opts_);
    }

    void release(std::unique_ptr<persistence::Store> s) {
        if (!s) return;
        std::lock_guard lock(mu_);
        idle_.push_back(std::move(s));
    }

    persistence::StoreOptions opts_;
    std::mutex mu_;
    std::vector<std::unique_ptr<persistence::Store>> idle_;
};

class Server {
public:
    explicit Server(ServiceConfig cfg, persistence::Clock clock = persistence::system_clock_ms)
        : Server(cfg, std::move(clock), make_captcha(cfg)) {}

    Server(ServiceConfig cfg, persistence::Clock clock, std::unique_ptr<CaptchaVerifier> captcha)
        : cfg_(std::move(cfg)),
          pool_(persistence::StoreOptions{cfg_.db_path, std::move(clock), persistence::default_session_ttl_ms,
                                          cfg_.password_iterations}),
          captcha_(std::move(captcha)),
          fits_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(cfg_.max_concurrent_fits, 1, 1024))) {
        const std::size_t threads = cfg_.worker_threads;
        http_.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
        http_.set_payload_max_length(4 * cfg_.rules.max_bytes + 65'536);
        http_.set_read_timeout(30);
        http_.set_write_timeout(30);
        routes();
    }

    httplib::Server& http() { return http_; }
    const ServiceConfig& config() const { return cfg_; }

    // Binds cfg.port (0 picks a free port) and returns the bound port.
    int bind() {
        if (cfg_.port == 0) return http_.bind_to_any_port(cfg_.host);
        return http_.bind_to_port(cfg_.host, cfg_.port) ? cfg_.port : -1;
    }
    bool listen_after_bind() { return http_.listen_after_bind(); }
    void stop() { http_.stop(); }

private:
    using Req = httplib::Request;
    using Res = httplib::Response;

    static void send(Res& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    template <typename F>
    httplib::Server::Handler wrap(F f) {
        return [f = std::move(f)](const Req& req, Res& res) {
            try {
                f(req, res);
            } catch (const HttpError& e) {
                send(res, e.status, error_body(e.code, e.what()));
            } catch (const ValidationFailed& e) {
                json body = error_body(e.code(), e.what());
                body["violations"] = json::array();
                for (const auto& v : e.report().violations) body["violations"].push_back(violation_json(v));
                send(res, e.report().codes().count(violation::bytes) ? 413 : 400, body);
            } catch (const Error& e) {
                send(res, status_for(e.code()), error_body(e.code(), e.what()));
            } catch (const std::exception& e) {
                send(res, 500, error_body("E_INTERNAL", e.what()));
            }
        };
    }

    static json parse_body(const Req& req) {
        json j = json::parse(req.body, nullptr, false);
        if (j.is_discarded()) throw Error(ecode::request, "request body is not valid JSON");
        if (!j.is_object()) throw Error(ecode::request, "request body must be a JSON object");
        return j;
    }

    static std::string string_field(const json& j, const char* name, bool required = true) {
        if (!j.contains(name)) {
            if (required) throw Error(ecode::request, std::string("missing field '") + name + "'");
            return {};
        }
        if (!j[name].is_string()) throw Error(ecode::request, std::string("field '") + name + "' must be a string");
        return j[name].get<std::string>();
    }

    static std::int64_t path_id(const Req& req) {
        const std::string& s = req.matches[1];
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) throw Error(errc::not_found, "no such id " + s);
        return v;
    }

    static std::string bearer_token(const Req& req) {
        const std::string auth = req.get_header_value("Authorization");
        if (auth.rfind("Bearer ", 0) == 0) return auth.substr(7);
        const std::string cookies = req.get_header_value("Cookie");
        std::size_t pos = 0;
        while (pos < cookies.size()) {
            std::size_t end = cookies.find(';', pos);
            if (end == std::string::npos) end = cookies.size();
            std::string_view part(cookies.data() + pos, end - pos);
            while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
            const std::string prefix = std::string(session_cookie) + "=";
            if (part.rfind(prefix, 0) == 0) return std::string(part.substr(prefix.size()));
            pos = end + 1;
        }
        return {};
    }

    persistence::UserAccount require_user(const Req& req) {
        auto store = pool_.acquire();
        auto user = store->session_user(bearer_token(req));
        if (!user) throw Error(errc::auth, "sign in required");
        return *user;
    }

    void check_captcha(const json& body, const Req& req) {
        if (!captcha_) return;
        const std::string token = body.contains("captcha") && body["captcha"].is_string() ? body["captcha"].get<std::string>() : "";
        if (!captcha_->verify(token, req.remote_addr)) throw Error("E_CAPTCHA", "captcha verification failed");
    }

    void check_bytes(std::size_t n) const {
        if (n > cfg_.rules.max_bytes) {
            ValidationReport r;
            r.add(violation::bytes, "payload is " + std::to_string(n) + " bytes, limit is " +
                                        std::to_string(cfg_.rules.max_bytes));
            throw ValidationFailed(r);
        }
    }

    void check_size(std::size_t bytes, const Dataset& d) const {
        const ValidationReport r = validate_size(bytes, d.row_count(), d.col_count(), cfg_.rules);
        if (!r.ok()) throw ValidationFailed(r);
    }

    Dataset decode_payload(const std::string& wire) const {
        check_bytes(wire.size());
        Dataset d = codec::decode_wire(wire);
        check_size(wire.size(), d);
        return d;
    }

    // Runs `f` holding a fit slot and a fresh deadline. Core failures become
    // 422, deadline expiry 504.
    template <typename F>
    Outcome run_fit(F&& f) {
        fits_.acquire();
        struct Slot {
            std::counting_semaphore<1024>& s;
            ~Slot() { s.release(); }
        } slot{fits_};
        const Deadline deadline = Deadline::after(cfg_.fit_timeout);
        try {
            return f(deadline);
        } catch (const ValidationFailed&) {
            throw;
        } catch (const Error& e) {
            if (e.code() == errc::timeout) throw HttpError(504, e.code(), e.what());
            if (e.code() == ecode::unsupported) throw;
            throw HttpError(422, e.code(), e.what());
        } catch (const std::bad_alloc&) {
            throw HttpError(422, "E_RESOURCES", "fit ran out of memory");
        }
    }

    static json outcome_json(std::int64_t result_id, Algorithm algo, const Outcome& o) {
        return json{{"result_id", result_id},
                    {"algorithm", to_string(algo)},
                    {"summary", o.summary},
                    {"columns", o.output.columns},
                    {"output", codec::encode_wire(o.output)}};
    }

    void routes() {
        using persistence::ActionKind;

        http_.set_error_handler([](const Req&, Res& res) {
            if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
            if (res.status == 413)
                send(res, 413,
                     json{{"code", ecode::validation},
                          {"message", "request body too large"},
                          {"violations", {{{"code", violation::bytes}, {"message", "request body too large"}}}}});
            else
                send(res, res.status, error_body(res.status == 404 ? "E_NOT_FOUND" : "E_HTTP", httplib::status_message(res.status)));
            return httplib::Server::HandlerResponse::Handled;
        });

        http_.Get("/api/health", wrap([](const Req&, Res& res) { send(res, 200, json{{"ok", true}}); }));

        http_.Post("/api/auth/signup", wrap([this](const Req& req, Res& res) {
            const json body = parse_body(req);
            check_captcha(body, req);
            const std::string username = string_field(body, "username");
            const std::string password = string_field(body, "password");
            const std::string email = string_field(body, "email", false);
            auto store = pool_.acquire();
            auto tx = store->begin();
            const auto user = store->create_user(username, password, email);
            store->record_action(user.id, ActionKind::signup, "");
            tx.commit();
            send(res, 201, json{{"id", user.id}, {"username", user.username}});
        }));

        http_.Post("/api/auth/signin", wrap([this](const Req& req, Res& res) {
            const json body = parse_body(req);
            check_captcha(body, req);
            const std::string username = string_field(body, "username");
            const std::string password = string_field(body, "password");
            auto store = pool_.acquire();
            auto tx = store->begin();
            const auto session = store->authenticate(username, password);
            store->record_action(session.user_id, ActionKind::signin, "");
            tx.commit();
            res.set_header("Set-Cookie", std::string(session_cookie) + "=" + session.token +
                                             "; Path=/; HttpOnly; SameSite=Strict; Max-Age=" +
                                             std::to_string(persistence::default_session_ttl_ms / 1000));
            send(res, 200, json{{"token", session.token}, {"username", username}, {"expires_at", session.expires_at}});
        }));

        http_.Post("/api/auth/signout", wrap([this](const Req& req, Res& res) {
            const std::string token = bearer_token(req);
            if (!token.empty()) pool_.acquire()->revoke_session(token);
            res.set_header("Set-Cookie", std::string(session_cookie) + "=; Path=/; HttpOnly; SameSite=Strict; Max-Age=0");
            send(res, 200, json{{"authenticated", false}});
        }));

        http_.Get("/api/auth/status", wrap([this](const Req& req, Res& res) {
            auto user = pool_.acquire()->session_user(bearer_token(req));
            if (user)
                send(res, 200, json{{"authenticated", true}, {"username", user->username}});
            else
                send(res, 200, json{{"authenticated", false}, {"prompt", "signin"}, {"message", "Please sign in or sign up."}});
        }));

        http_.Post("/api/datasets", wrap([this](const Req& req, Res& res) {
            const auto user = require_user(req);
            check_bytes(req.body.size());
            const Dataset d = codec::parse_csv(req.body);
            check_size(req.body.size(), d);
            std::string name = req.has_param("name") ? req.get_param_value("name") : "dataset.csv";
            if (codec::find_invalid_utf8(name) != std::string::npos || name.empty() || name.size() > 255)
                throw Error(ecode::request, "dataset name must be 1 to 255 bytes of UTF-8");
            auto store = pool_.acquire();
            auto tx = store->begin();
            const auto info = store->store_dataset(user.id, name, req.body, static_cast<std::int64_t>(d.row_count()),
                                                   static_cast<std::int64_t>(d.col_count()));
            store->record_action(user.id, ActionKind::upload, "dataset=" + std::to_string(info.id));
            tx.commit();
            send(res, 201, json{{"dataset_id", info.id},
                                {"name", info.name},
                                {"rows", info.row_count},
                                {"cols", info.col_count},
                                {"columns", d.columns}});
        }));

        http_.Get("/api/datasets", wrap([this](const Req& req, Res& res) {
            const auto user = require_user(req);
            json list = json::array();
            for (const auto& d : pool_.acquire()->list_datasets(user.id))
                list.push_back(json{{"dataset_id", d.id},
                                    {"name", d.name},
                                    {"rows", d.row_count},
                                    {"cols", d.col_count},
                                    {"uploaded_at", d.uploaded_at}});
            send(res, 200, json{{"datasets", list}});
        }));

        http_.Get(R"(/api/datasets/(\d+))", wrap([this](const Req& req, Res& res) {
            const auto user = require_user(req);
            const auto d = pool_.acquire()->load_dataset(user.id, path_id(req));
            res.status = 200;
            res.set_content(d.csv_bytes, "text/csv; charset=utf-8");
        }));

        http_.Post("/api/analyze/train", wrap([this](const Req& req, Res& res) {
            const auto user = require_user(req);
            const AnalysisRequest ar = AnalysisRequest::from_json(parse_body(req));
            Dataset d;
            std::string source = "inline";
            if (ar.data) {
                d = decode_payload(*ar.data);
            } else {
                const auto stored = pool_.acquire()->load_dataset(user.id, *ar.dataset_id);
                d = codec::parse_csv(stored.csv_bytes);
                check_size(stored.csv_bytes.size(), d);
                source = std::to_string(*ar.dataset_id);
            }
            const auto target = check_schema(d, ar);
            const Outcome o = run_fit([&](const Deadline& dl) { return train(d, ar, target, dl); });

            auto store = pool_.acquire();
            auto tx = store->begin();
            const auto id = store->store_result(user.id, o.model, o.output);
            store->record_action(user.id, ActionKind::train,
                                 "result=" + std::to_string(id) + " algorithm=" + std::string(to_string(ar.algorithm)) +
                                     " dataset=" + source);
            tx.commit();
            send(res, 200, outcome_json(id, ar.algorithm, o));
        }));

        http_.Post("/api/analyze/predict", wrap([this](const Req& req, Res& res) {
            const auto user = require_user(req);
            const json body = parse_body(req);
            for (const auto& [key, _] : body.items())
                if (key != "result_id" && key != "data") throw Error(ecode::request, "unknown request field '" + key + "'");
            if (!body.contains("result_id") || !body["result_id"].is_number_integer())
                throw Error(ecode::request, "'result_id' must be an integer");
            const std::int64_t source_id = body["result_id"].get<std::int64_t>();
            const std::string wire = string_field(body, "data");

            const auto stored = pool_.acquire()->load_result(user.id, source_id);
            if (stored.algorithm == Algorithm::kmeans)
                throw Error(ecode::unsupported, "k-means results have no prediction step");
            const Dataset d = decode_payload(wire);
            const Outcome o = run_fit([&](const Deadline& dl) { return predict(stored.model, d, dl); });

            auto store = pool_.acquire();
            auto tx = store->begin();
            const auto id = store->store_result(user.id, o.model, o.output);
            store->record_action(user.id, ActionKind::predict,
                                 "result=" + std::to_string(id) + " model=" + std::to_string(source_id));
            tx.commit();
            send(res, 200, outcome_json(id, stored.algorithm, o));
        }));

        http_.Get(R"(/api/results/(\d+))", wrap([this](const Req& req, Res& res) {
            const auto user = require_user(req);
            const auto r = pool_.acquire()->load_result(user.id, path_id(req));
            send(res, 200,
                 json{{"result_id", r.id},
                      {"algorithm", to_string(r.algorithm)},
                      {"created_at", r.created_at},
                      {"columns", r.output.columns},
                      {"output", codec::encode_wire(r.output)}});
        }));

        // A result's first download is audited; repeats (other formats,
        // re-downloads) are reads of an already recorded export.
        http_.Get(R"(/api/results/(\d+)/download)", wrap([this](const Req& req, Res& res) {
            const auto user = require_user(req);
            const auto format = codec::parse_export_format(req.has_param("format") ? req.get_param_value("format") : "");
            const std::int64_t id = path_id(req);
            auto store = pool_.acquire();
            const auto r = store->load_result(user.id, id);
            const std::string bytes = codec::export_dataset(r.output, format);
            const std::string detail = "result=" + std::to_string(id);
            auto tx = store->begin();
            if (!store->has_action(user.id, ActionKind::download, detail))
                store->record_action(user.id, ActionKind::download, detail);
            tx.commit();
            const char* ext = format == codec::ExportFormat::csv ? "csv" : "txt";
            res.set_header("Content-Disposition",
                           "attachment; filename=\"result-" + std::to_string(id) + "." + ext + "\"");
            res.status = 200;
            res.set_content(bytes, codec::content_type(format));
        }));

        if (!cfg_.static_dir.empty() && !http_.set_mount_point("/", cfg_.static_dir))
            throw Error(errc::argument, "static directory does not exist: " + cfg_.static_dir);
    }

    ServiceConfig cfg_;
    StorePool pool_;
    std::unique_ptr<CaptchaVerifier> captcha_;
    std::counting_semaphore<1024> fits_;
    httplib::Server http_;
};

}  // namespace vanlearn::service
