#include "homethreat/service.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "homethreat/engine.hpp"
#include "homethreat/report.hpp"

namespace homethreat::service {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kPlaceholderPage = R"(<!doctype html>
<html lang="en">
<head><meta charset="utf-8"><title>Home threat model</title></head>
<body>
<h1>Home threat model</h1>
<p>The service is running. The browser interface has not been built; the JSON API is available under <code>/api/</code>.</p>
</body>
</html>
)";

// Paths safe to log. Anything else is logged as "-" so request-derived
// text never reaches the log.
constexpr std::string_view kKnownPaths[] = {"/", "/api/health", "/api/catalog", "/api/glossary", "/api/model"};

std::string_view loggable_path(std::string_view path) {
    for (auto p : kKnownPaths) {
        if (p == path) return p;
    }
    return "-";
}

Response json_response(int status, const json& body) { return {status, "application/json", body.dump(2) + "\n"}; }

Response error_response(int status, std::string_view code, std::string_view message) {
    return json_response(status, json{{"error", code}, {"message", message}});
}

struct FieldError {
    std::string field;
    std::optional<std::string> value;
    std::string message;
};

json field_errors_json(const std::vector<FieldError>& errors) {
    json fields = json::array();
    for (const auto& e : errors) {
        json f{{"field", e.field}};
        if (e.value) f["value"] = *e.value;
        f["message"] = e.message;
        fields.push_back(std::move(f));
    }
    return json{{"error", "validation_failed"},
                {"message", errors.size() == 1 ? errors.front().message
                                               : std::to_string(errors.size()) + " fields are invalid"},
                {"fields", std::move(fields)}};
}

std::vector<std::string> string_array(const json& body, const char* key, bool required,
                                      std::vector<FieldError>& errors) {
    std::vector<std::string> out;
    if (!body.contains(key)) {
        if (required) errors.push_back({key, std::nullopt, std::string(key) + " is required"});
        return out;
    }
    const json& arr = body.at(key);
    if (!arr.is_array()) {
        errors.push_back({key, std::nullopt, std::string(key) + " must be an array of strings"});
        return out;
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_string()) {
            errors.push_back({std::string(key) + "[" + std::to_string(i) + "]", std::nullopt, "expected a string"});
            continue;
        }
        out.push_back(arr[i].get<std::string>());
    }
    return out;
}

struct ParsedRequest {
    ModelInput input;
    std::vector<FieldError> errors;
};

ParsedRequest parse_model_request(const json& body, const Catalog& catalog) {
    ParsedRequest p;
    auto& errors = p.errors;
    if (!body.is_object()) {
        errors.push_back({"", std::nullopt, "request body must be a JSON object"});
        return p;
    }
    for (const auto& [key, _] : body.items()) {
        if (key != "devices" && key != "risk_factors" && key != "connections" && key != "display_name") {
            errors.push_back({key, std::nullopt, "unknown field '" + key + "'"});
        }
    }

    p.input.devices = string_array(body, "devices", true, errors);
    for (std::size_t i = 0; i < p.input.devices.size(); ++i) {
        const auto& id = p.input.devices[i];
        if (!catalog.find_device(id)) {
            errors.push_back({"devices[" + std::to_string(i) + "]", id, "unknown device '" + id + "'"});
        }
    }

    p.input.selected_risk_factors = string_array(body, "risk_factors", false, errors);
    for (std::size_t i = 0; i < p.input.selected_risk_factors.size(); ++i) {
        const auto& id = p.input.selected_risk_factors[i];
        if (!catalog.find_risk_factor(id)) {
            errors.push_back({"risk_factors[" + std::to_string(i) + "]", id, "unknown risk factor '" + id + "'"});
        }
    }

    if (body.contains("connections")) {
        const json& conns = body.at("connections");
        if (!conns.is_array()) {
            errors.push_back({"connections", std::nullopt, "connections must be an array of device-id pairs"});
        } else {
            for (std::size_t i = 0; i < conns.size(); ++i) {
                const std::string field = "connections[" + std::to_string(i) + "]";
                const json& pair = conns[i];
                if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
                    errors.push_back({field, std::nullopt, "expected a pair of device ids"});
                    continue;
                }
                const auto a = pair[0].get<std::string>();
                const auto b = pair[1].get<std::string>();
                bool ok = true;
                for (const auto& id : {a, b}) {
                    if (std::find(p.input.devices.begin(), p.input.devices.end(), id) == p.input.devices.end()) {
                        errors.push_back({field, id, "connection references unselected device '" + id + "'"});
                        ok = false;
                    }
                }
                if (ok && a == b) {
                    errors.push_back({field, a, "device '" + a + "' cannot connect to itself"});
                    ok = false;
                }
                if (ok) p.input.connections.emplace_back(a, b);
            }
        }
    }

    if (body.contains("display_name")) {
        const json& name = body.at("display_name");
        if (name.is_string()) {
            p.input.display_name = name.get<std::string>();
        } else if (!name.is_null()) {
            errors.push_back({"display_name", std::nullopt, "display_name must be a string"});
        }
    }
    return p;
}

json catalog_json(const Catalog& c) {
    json devices = json::array();
    for (const auto& d : c.devices) {
        devices.push_back({{"id", d.id}, {"label", d.label}, {"categories", d.categories}});
    }
    json factors = json::array();
    for (const auto& r : c.risk_factors) {
        factors.push_back({{"id", r.id},
                           {"question_text", r.question},
                           {"weight", r.weight},
                           {"related_threats", r.related_threats}});
    }
    json threats = json::array();
    for (const auto& t : c.threats) {
        threats.push_back({{"id", t.id}, {"short_name", t.short_name}, {"stride", std::string(1, t.stride)}});
    }
    json categories = json::array();
    for (const auto& cat : c.categories) {
        categories.push_back({{"id", cat.id}, {"description", cat.description}, {"threat_ids", cat.threat_ids}});
    }
    json glossary = json::object();
    for (const auto& g : c.glossary) glossary[g.term] = g.definition;
    json guidance = json::array();
    for (const auto& d : c.devices) {
        const auto& links = c.guidance_for(d.id);
        if (links.empty()) continue;
        json items = json::array();
        for (const auto& l : links) items.push_back({{"label", l.label}, {"url", l.url}});
        guidance.push_back({{"device", d.id}, {"links", std::move(items)}});
    }
    return json{{"schema_version", c.schema_version}, {"devices", std::move(devices)},
                {"risk_factors", std::move(factors)}, {"threats", std::move(threats)},
                {"categories", std::move(categories)}, {"glossary", std::move(glossary)},
                {"guidance", std::move(guidance)}};
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

}  // namespace

bool is_loopback(std::string_view address) {
    const std::string a(address);
    if (a == "localhost") return true;
    in_addr v4{};
    if (::inet_pton(AF_INET, a.c_str(), &v4) == 1) return (ntohl(v4.s_addr) >> 24) == 127;
    in6_addr v6{};
    if (::inet_pton(AF_INET6, a.c_str(), &v6) == 1) return IN6_IS_ADDR_LOOPBACK(&v6);
    return false;
}

struct Service::Server {
    httplib::Server http;
};

Service::Service(Catalog catalog, std::shared_ptr<spdlog::logger> logger)
    : catalog_(std::move(catalog)), logger_(std::move(logger)) {}

Service::~Service() = default;

Response Service::handle(const Request& request) const {
    const std::string& path = request.path;
    const bool is_get = request.method == "GET" || request.method == "HEAD";

    if (path == "/") {
        if (!is_get) return error_response(405, "method_not_allowed", "use GET");
        return {200, "text/html; charset=utf-8", std::string(kPlaceholderPage)};
    }
    if (path == "/api/health") {
        if (!is_get) return error_response(405, "method_not_allowed", "use GET");
        return json_response(200, json{{"status", "ok"}, {"schema_version", kReportSchemaVersion}});
    }
    if (path == "/api/catalog") {
        if (!is_get) return error_response(405, "method_not_allowed", "use GET");
        return json_response(200, catalog_json(catalog_));
    }
    if (path == "/api/glossary") {
        if (!is_get) return error_response(405, "method_not_allowed", "use GET");
        json terms = json::object();
        for (const auto& g : catalog_.glossary) terms[g.term] = g.definition;
        return json_response(200, terms);
    }
    if (path != "/api/model") return error_response(404, "not_found", "no such endpoint");

    if (request.method != "POST") return error_response(405, "method_not_allowed", "use POST");
    if (!request.origin.empty() && request.origin != "http://" + request.host) {
        return error_response(403, "cross_origin", "cross-origin requests are not accepted");
    }
    if (!starts_with_ci(request.content_type, "application/json")) {
        return error_response(415, "unsupported_media_type", "send the request as application/json");
    }
    if (request.body.size() > kMaxBodyBytes) {
        return error_response(413, "payload_too_large", "request body exceeds 64 KiB");
    }

    json body;
    try {
        body = json::parse(request.body);
    } catch (const json::parse_error&) {
        return error_response(400, "invalid_json", "request body is not valid JSON");
    }

    ParsedRequest parsed = parse_model_request(body, catalog_);
    if (!parsed.errors.empty()) return json_response(422, field_errors_json(parsed.errors));

    try {
        const Report report = score_model(parsed.input, catalog_);
        return {200, "application/json", render(report, ReportFormat::Machine).body};
    } catch (const EvaluationError& e) {
        return json_response(422, field_errors_json({{"input", e.subject(), e.what()}}));
    }
}

int Service::bind(const Config& config) {
    if (!config.allow_external && !is_loopback(config.bind)) {
        throw ConfigError("refusing to listen on non-loopback address '" + config.bind +
                          "'; pass --allow-external to permit it");
    }
    if (config.port < 0 || config.port > 65535) throw ConfigError("port out of range");

    server_ = std::make_unique<Server>();
    auto& http = server_->http;

    const auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
        const Response out = handle({req.method, req.path, req.body, req.get_header_value("Content-Type"),
                                     req.get_header_value("Origin"), req.get_header_value("Host")});
        res.status = out.status;
        res.set_content(out.body, out.content_type);
    };
    const std::string api = R"(/api/.*)";
    http.Get(api, dispatch);
    http.Post(api, dispatch);
    http.Put(api, dispatch);
    http.Delete(api, dispatch);
    http.Patch(api, dispatch);

    if (config.ui_dir.empty()) {
        http.Get("/", dispatch);
    } else if (!http.set_mount_point("/", config.ui_dir)) {
        throw ConfigError("UI directory '" + config.ui_dir + "' does not exist");
    }

    http.set_payload_max_length(kMaxBodyBytes);
    http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
        const Response out = res.status == 413
                                 ? error_response(413, "payload_too_large", "request body exceeds 64 KiB")
                                 : error_response(res.status, "error", httplib::status_message(res.status));
        res.set_content(out.body, out.content_type);
        return httplib::Server::HandlerResponse::Handled;
    });
    http.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
        res.set_header("Cache-Control", "no-store");
        res.set_header("X-Content-Type-Options", "nosniff");
        res.set_header("Referrer-Policy", "no-referrer");
    });
    if (logger_) {
        http.set_logger([logger = logger_](const httplib::Request& req, const httplib::Response& res) {
            logger->info("{} {} {} {}B", req.method, loggable_path(req.path), res.status, res.body.size());
        });
    }

    int port = config.port;
    if (port == 0) {
        port = http.bind_to_any_port(config.bind);
        if (port < 0) throw ConfigError("cannot bind to " + config.bind);
    } else if (!http.bind_to_port(config.bind, port)) {
        throw ConfigError("cannot bind to " + config.bind + ":" + std::to_string(port));
    }
    if (logger_) logger_->info("listening on http://{}:{}", config.bind, port);
    return port;
}

void Service::listen() {
    if (!server_) throw ConfigError("bind() must succeed before listen()");
    server_->http.listen_after_bind();
}

void Service::stop() {
    if (server_) server_->http.stop();
}

}  // namespace homethreat::service
