// vanlearn-server: the HTTP API. Configuration comes from VANLEARN_*
// environment variables; the flags below override them.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "vanlearn/service/server.hpp"

namespace {
vanlearn::service::Server* running = nullptr;

extern "C" void on_signal(int) {
    if (running) running->stop();
}
}  // namespace

int main(int argc, char** argv) {
    using namespace vanlearn;

    service::ServiceConfig cfg;
    try {
        cfg = service::ServiceConfig::from_env();
    } catch (const Error& e) {
        std::cerr << "config error " << e.code() << ": " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"vanlearn HTTP service"};
    app.add_option("--host", cfg.host, "Listen address")->capture_default_str();
    app.add_option("--port", cfg.port, "Listen port (0 picks a free one)")->capture_default_str();
    app.add_option("--db", cfg.db_path, "SQLite database file")->capture_default_str();
    app.add_option("--static-dir", cfg.static_dir, "Serve web client assets from this directory");
    CLI11_PARSE(app, argc, argv);

    try {
        service::Server server(cfg);
        const int port = server.bind();
        if (port <= 0) {
            std::cerr << "cannot listen on " << cfg.host << ":" << cfg.port << "\n";
            return 1;
        }
        running = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cout << "vanlearn listening on http://" << cfg.host << ":" << port << " (db " << cfg.db_path << ")"
                  << std::endl;
        server.listen_after_bind();
        running = nullptr;
    } catch (const Error& e) {
        std::cerr << "error " << e.code() << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
