// Annotation service daemon.
//
//   parannot_server [--config FILE]
//
// PARANNOT_LISTEN, PARANNOT_DATA_DIR, PARANNOT_CLAIM_LEASE_SECONDS,
// PARANNOT_DOUBLE_ANNOTATION and PARANNOT_SHUFFLE_QUEUE override the file.

#include <csignal>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "parannot/http.hpp"

namespace {
httplib::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Paraphrase annotation service", "parannot_server"};
    std::optional<std::string> config_path;
    app.add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    CLI11_PARSE(app, argc, argv);

    parannot::ServiceConfig config;
    try {
        std::optional<std::filesystem::path> path;
        if (config_path) path = *config_path;
        config = parannot::load_config(path);
    } catch (const std::exception& e) {
        std::cerr << "config: " << e.what() << '\n';
        return 2;
    }

    std::unique_ptr<parannot::Store> store;
    try {
        store = config.data_dir.empty() ? std::make_unique<parannot::Store>()
                                        : std::make_unique<parannot::Store>(config.data_dir);
    } catch (const std::exception& e) {
        std::cerr << "store: " << e.what() << '\n';
        return 2;
    }
    if (config.data_dir.empty()) std::cerr << "warning: no data_dir configured, annotations live in memory only\n";

    parannot::AnnotationService service(*store, config);
    httplib::Server server;
    parannot::mount_routes(server, service);

    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    std::cerr << "listening on " << config.host << ':' << config.port << '\n';
    if (!server.listen(config.host, config.port)) {
        std::cerr << "cannot listen on " << config.host << ':' << config.port << '\n';
        return 1;
    }
    return 0;
}
