#pragma once

// Loopback HTTP facade over catalog, engine and report.
//
//   GET  /api/health    status and schema version
//   GET  /api/catalog   devices, risk-factor questions, glossary, guidance labels
//   GET  /api/glossary  term -> definition
//   POST /api/model     ModelRequest -> machine-format report
//   GET  /              UI assets, or a placeholder page
//
// Responses never carry a timestamp, so identical requests get identical bodies.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "homethreat/catalog.hpp"

namespace spdlog {
class logger;
}

namespace homethreat::service {

inline constexpr int kDefaultPort = 7707;
inline constexpr std::string_view kDefaultBind = "127.0.0.1";
inline constexpr std::size_t kMaxBodyBytes = 64 * 1024;

struct Config {
    std::string bind{kDefaultBind};
    int port = kDefaultPort;  ///< 0 picks a free port
    bool allow_external = false;
    std::string ui_dir;  ///< empty serves the placeholder page
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 127.0.0.0/8, ::1 and "localhost".
bool is_loopback(std::string_view address);

struct Request {
    std::string method;
    std::string path;
    std::string body;
    std::string content_type;
    std::string origin;  ///< Origin header, empty when absent
    std::string host;    ///< Host header
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

class Service {
public:
    /// `logger` receives one access line per request; null disables logging.
    explicit Service(Catalog catalog, std::shared_ptr<spdlog::logger> logger = nullptr);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Routing without sockets. Thread-safe.
    Response handle(const Request& request) const;

    /// Binds according to `config`; returns the bound port. Throws ConfigError.
    int bind(const Config& config);
    /// Serves until stop(). Requires a successful bind().
    void listen();
    void stop();

    const Catalog& catalog() const { return catalog_; }

private:
    struct Server;

    Catalog catalog_;
    std::shared_ptr<spdlog::logger> logger_;
    std::unique_ptr<Server> server_;
};

}  // namespace homethreat::service
