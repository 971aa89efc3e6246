#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "homethreat/service.hpp"

namespace {

homethreat::service::Service* g_service = nullptr;

extern "C" void on_signal(int) {
    if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace homethreat;

    service::Config config;
    std::string catalog_path;
    std::string log_level = "info";

    CLI::App app{"Serve the home threat model on a loopback address.", "homethreat-service"};
    app.add_option("--bind", config.bind, "Address to listen on")->capture_default_str();
    app.add_option("--port", config.port, "Port to listen on; 0 picks a free one")->capture_default_str();
    app.add_option("--catalog", catalog_path, "Catalog JSON file to use instead of the built-in one");
    app.add_flag("--allow-external", config.allow_external, "Permit a non-loopback bind address");
    app.add_option("--ui-dir", config.ui_dir, "Directory of built UI assets served at /");
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
    CLI11_PARSE(app, argc, argv);

    auto logger = spdlog::stderr_logger_mt("homethreat-service");
    logger->set_pattern("%Y-%m-%dT%H:%M:%S%z %l %v");
    logger->set_level(spdlog::level::from_str(log_level));
    logger->flush_on(spdlog::level::trace);

    try {
        Catalog catalog = catalog_path.empty() ? default_catalog() : load_catalog_file(catalog_path);
        service::Service svc(std::move(catalog), logger);
        svc.bind(config);
        g_service = &svc;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        svc.listen();
        g_service = nullptr;
        logger->info("stopped");
    } catch (const CatalogError& e) {
        std::cerr << "error: catalog: " << e.what() << "\n";
        return 2;
    } catch (const service::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
