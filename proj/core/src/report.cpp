#include "homethreat/report.hpp"

#include <cfenv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace homethreat {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kEmptyMessage =
    "No threats identified for the devices and answers given. Review your device list and "
    "risk-factor answers, then run the model again.";
constexpr std::string_view kScoreNote =
    "Scores are dimensionless: they rank threats against each other within this report.";

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::string severity_label(cvss::Score s, bool color) {
    const cvss::Severity sev = cvss::severity(s);
    std::string label = s.str() + " (" + cvss::severity_letter(sev) + ")";
    if (!color) return label;
    std::string_view code;
    switch (sev) {
        case cvss::Severity::None: code = "\x1b[2m"; break;
        case cvss::Severity::Low: code = "\x1b[32m"; break;
        case cvss::Severity::Medium: code = "\x1b[33m"; break;
        case cvss::Severity::High: code = "\x1b[31m"; break;
        case cvss::Severity::Critical: code = "\x1b[1;31m"; break;
    }
    return std::string(code) + label + "\x1b[0m";
}

std::string cvss_triple(const cvss::ScoreTriple& s, bool color) {
    return severity_label(s.base, color) + " / " + severity_label(s.temporal, color) + " / " +
           severity_label(s.environmental, color);
}

std::string device_list(const Report& report) {
    return report.device_labels.empty() ? "none" : join(report.device_labels, ", ");
}

std::string risk_factor_list(const Report& report) {
    return report.input.selected_risk_factors.empty() ? "none"
                                                      : join(report.input.selected_risk_factors, ", ");
}

std::string breakdown(const ThreatScore& s) {
    std::string additions;
    int total = 0;
    std::vector<std::string> parts;
    for (const auto& a : s.additions) {
        total += a.weight;
        parts.push_back(a.risk_factor + " +" + std::to_string(a.weight));
    }
    additions = "+" + std::to_string(total);
    if (!parts.empty()) additions += " (" + join(parts, ", ") + ")";

    std::string out = "CVSS average " + format_score(s.base_mean) + ", risk factors " + additions +
                      ", protections in place -" + std::to_string(s.subtractions_applied) +
                      ", privacy bonus +" + format_score(s.lindunn_bonus) + " = " +
                      format_score(s.final_score);
    return out;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string lpad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string render_text(const Report& r, bool color) {
    std::ostringstream out;
    out << "HOME THREAT MODEL REPORT\n";
    if (r.input.display_name) out << "Prepared for: " << *r.input.display_name << "\n";
    if (r.generated_at) out << "Generated: " << *r.generated_at << "\n";
    out << "\n";
    out << "Devices: " << device_list(r) << "\n";
    out << "Risk factors selected: " << risk_factor_list(r) << "\n";
    if (!r.input.connections.empty()) {
        std::vector<std::string> pairs;
        for (const auto& [a, b] : r.input.connections) pairs.push_back(a + " <-> " + b);
        out << "Connections (informational): " << join(pairs, ", ") << "\n";
    }
    out << "Active device categories:";
    if (r.active_categories.empty()) out << " none";
    out << "\n";
    for (const auto& c : r.active_categories) {
        out << "  Cat " << c.id << " - " << c.description << "\n";
        out << "    Privacy factors (" << c.lindunn_factors.size() << ", bonus "
            << format_score(c.bonus) << "): " << join(c.lindunn_factors, ", ") << "\n";
    }
    out << "\n";

    if (r.threats.empty()) {
        out << kEmptyMessage << "\n";
        return out.str();
    }

    out << "Threats ranked by score (" << r.threats.size() << "):\n";
    out << "Rank  Score   Threat                            Type  CVSS base / temporal / environmental\n";
    for (std::size_t i = 0; i < r.threats.size(); ++i) {
        const auto& [s, t] = r.threats[i];
        out << lpad(std::to_string(i + 1), 4) << "  " << lpad(format_score(s.final_score), 6) << "  "
            << pad(t.short_name + " (" + std::to_string(t.id) + ")", 34) << pad(std::string(1, t.stride), 6)
            << cvss_triple(t.scores, color) << "\n";
    }

    out << "\nDetails\n";
    for (std::size_t i = 0; i < r.threats.size(); ++i) {
        const auto& [s, t] = r.threats[i];
        out << "\n" << i + 1 << ". " << t.short_name << " (threat " << t.id << "), score "
            << format_score(s.final_score) << "\n";
        out << "   What could happen: " << t.description << "\n";
        out << "   How the score was built: " << breakdown(s) << "\n";
        out << "   What you can do: " << t.mitigation << "\n";
    }

    if (!r.guidance.empty()) {
        out << "\nFurther guidance\n";
        for (const auto& g : r.guidance) {
            out << "  " << g.device_label << ": " << g.label << " <" << g.url << ">\n";
        }
    }
    out << "\n" << kScoreNote << "\n";
    return out.str();
}

std::string render_markdown(const Report& r) {
    std::ostringstream out;
    out << "# Home threat model report\n\n";
    if (r.input.display_name) out << "Prepared for **" << *r.input.display_name << "**.\n\n";
    if (r.generated_at) out << "Generated " << *r.generated_at << ".\n\n";
    out << "- **Devices:** " << device_list(r) << "\n";
    out << "- **Risk factors selected:** " << risk_factor_list(r) << "\n";
    if (!r.input.connections.empty()) {
        std::vector<std::string> pairs;
        for (const auto& [a, b] : r.input.connections) pairs.push_back(a + " <-> " + b);
        out << "- **Connections (informational):** " << join(pairs, ", ") << "\n";
    }
    out << "\n## Active device categories\n\n";
    if (r.active_categories.empty()) out << "None.\n";
    for (const auto& c : r.active_categories) {
        out << "- **Cat " << c.id << ": " << c.description << "** (privacy bonus "
            << format_score(c.bonus) << "): " << join(c.lindunn_factors, ", ") << "\n";
    }

    out << "\n## Ranked threats\n\n";
    if (r.threats.empty()) {
        out << kEmptyMessage << "\n";
        return out.str();
    }
    out << "| Rank | Score | Threat | STRIDE | CVSS base / temporal / environmental |\n";
    out << "|---:|---:|---|:---:|---|\n";
    for (std::size_t i = 0; i < r.threats.size(); ++i) {
        const auto& [s, t] = r.threats[i];
        out << "| " << i + 1 << " | " << format_score(s.final_score) << " | " << t.short_name << " ("
            << t.id << ") | " << t.stride << " | " << cvss_triple(t.scores, false) << " |\n";
    }

    out << "\n## Details\n";
    for (std::size_t i = 0; i < r.threats.size(); ++i) {
        const auto& [s, t] = r.threats[i];
        out << "\n### " << i + 1 << ". " << t.short_name << " (score " << format_score(s.final_score)
            << ")\n\n";
        out << t.description << "\n\n";
        out << "- **Score breakdown:** " << breakdown(s) << "\n";
        out << "- **CVSS vector:** `" << cvss::canonical_string(t.vector) << "`\n";
        out << "- **What you can do:** " << t.mitigation << "\n";
    }

    if (!r.guidance.empty()) {
        out << "\n## Further guidance\n\n";
        for (const auto& g : r.guidance) {
            out << "- " << g.device_label << ": [" << g.label << "](" << g.url << ")\n";
        }
    }
    out << "\n_" << kScoreNote << "_\n";
    return out.str();
}

double tenths_to_double(cvss::Score s) { return s.value(); }

cvss::Score score_from_json(const ojson& j) {
    return cvss::Score::from_tenths(static_cast<int>(std::lround(j.get<double>() * 10.0)));
}

ojson machine_json(const Report& r) {
    ojson root;
    root["schema_version"] = kReportSchemaVersion;
    root["generated_at"] = r.generated_at ? ojson(*r.generated_at) : ojson(nullptr);

    ojson input;
    input["devices"] = r.input.devices;
    input["device_labels"] = r.device_labels;
    input["risk_factors"] = r.input.selected_risk_factors;
    input["connections"] = ojson::array();
    for (const auto& [a, b] : r.input.connections) input["connections"].push_back({a, b});
    input["display_name"] = r.input.display_name ? ojson(*r.input.display_name) : ojson(nullptr);
    root["input"] = std::move(input);

    root["active_categories"] = ojson::array();
    for (const auto& c : r.active_categories) {
        ojson cat;
        cat["id"] = c.id;
        cat["description"] = c.description;
        cat["threat_ids"] = c.threat_ids;
        cat["lindunn_factors"] = c.lindunn_factors;
        cat["bonus"] = c.bonus;
        root["active_categories"].push_back(std::move(cat));
    }

    root["threats"] = ojson::array();
    for (std::size_t i = 0; i < r.threats.size(); ++i) {
        const auto& [s, t] = r.threats[i];
        ojson th;
        th["rank"] = i + 1;
        th["id"] = t.id;
        th["short_name"] = t.short_name;
        th["stride"] = std::string(1, t.stride);
        th["description"] = t.description;
        th["mitigation"] = t.mitigation;
        ojson cv;
        cv["vector"] = cvss::canonical_string(t.vector);
        cv["base"] = tenths_to_double(t.scores.base);
        cv["temporal"] = tenths_to_double(t.scores.temporal);
        cv["environmental"] = tenths_to_double(t.scores.environmental);
        cv["severity"] = {{"base", cvss::to_string(cvss::severity(t.scores.base))},
                          {"temporal", cvss::to_string(cvss::severity(t.scores.temporal))},
                          {"environmental", cvss::to_string(cvss::severity(t.scores.environmental))}};
        th["cvss"] = std::move(cv);
        th["base_mean"] = s.base_mean;
        th["additions"] = ojson::array();
        for (const auto& a : s.additions) {
            th["additions"].push_back({{"risk_factor", a.risk_factor}, {"weight", a.weight}});
        }
        th["subtractions_applied"] = s.subtractions_applied;
        th["lindunn_bonus"] = s.lindunn_bonus;
        th["final"] = s.final_score;
        th["final_display"] = format_score(s.final_score);
        th["zeroed_by_rule"] = s.zeroed_by_rule;
        root["threats"].push_back(std::move(th));
    }

    root["guidance"] = ojson::array();
    for (const auto& g : r.guidance) {
        root["guidance"].push_back(
            {{"device", g.device_id}, {"device_label", g.device_label}, {"label", g.label}, {"url", g.url}});
    }
    return root;
}

}  // namespace

std::optional<ReportFormat> report_format_from_string(std::string_view name) {
    if (name == "text") return ReportFormat::Text;
    if (name == "markdown") return ReportFormat::Markdown;
    if (name == "machine") return ReportFormat::Machine;
    return std::nullopt;
}

std::string_view to_string(ReportFormat f) {
    switch (f) {
        case ReportFormat::Text: return "text";
        case ReportFormat::Markdown: return "markdown";
        case ReportFormat::Machine: return "machine";
    }
    return "text";
}

std::string format_score(double value) {
    // nearbyint honours the current rounding mode; force ties-to-even.
    const int saved = std::fegetround();
    std::fesetround(FE_TONEAREST);
    const auto hundredths = static_cast<long long>(std::nearbyint(value * 100.0));
    std::fesetround(saved);

    const long long mag = hundredths < 0 ? -hundredths : hundredths;
    std::ostringstream out;
    if (hundredths < 0) out << '-';
    out << mag / 100 << '.' << std::setw(2) << std::setfill('0') << mag % 100;
    return out.str();
}

RenderedReport render(const Report& report, ReportFormat format, const RenderOptions& options) {
    RenderedReport out;
    out.format = format;
    switch (format) {
        case ReportFormat::Text: out.body = render_text(report, options.color); break;
        case ReportFormat::Markdown: out.body = render_markdown(report); break;
        case ReportFormat::Machine: out.body = machine_json(report).dump(2) + "\n"; break;
    }
    if (report.threats.empty()) out.warnings.emplace_back("no threats identified");
    return out;
}

RenderedReport render(const Report& report, std::string_view format, const RenderOptions& options) {
    const auto f = report_format_from_string(format);
    if (!f) throw ReportError("unsupported report format '" + std::string(format) + "'");
    return render(report, *f, options);
}

Report parse_machine_report(std::string_view document) {
    try {
        const ojson root = ojson::parse(document);
        if (root.at("schema_version").get<int>() != kReportSchemaVersion) {
            throw ReportError("unsupported report schema_version");
        }
        Report r;
        if (!root.at("generated_at").is_null()) r.generated_at = root["generated_at"].get<std::string>();

        const ojson& input = root.at("input");
        r.input.devices = input.at("devices").get<std::vector<std::string>>();
        r.device_labels = input.at("device_labels").get<std::vector<std::string>>();
        r.input.selected_risk_factors = input.at("risk_factors").get<std::vector<std::string>>();
        for (const auto& pair : input.at("connections")) {
            r.input.connections.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
        }
        if (!input.at("display_name").is_null()) {
            r.input.display_name = input["display_name"].get<std::string>();
        }

        for (const auto& c : root.at("active_categories")) {
            CategoryProfile cat;
            cat.id = c.at("id").get<int>();
            cat.description = c.at("description").get<std::string>();
            cat.threat_ids = c.at("threat_ids").get<std::vector<int>>();
            cat.lindunn_factors = c.at("lindunn_factors").get<std::vector<std::string>>();
            cat.bonus = c.at("bonus").get<double>();
            r.active_categories.push_back(std::move(cat));
        }

        for (const auto& th : root.at("threats")) {
            RankedThreat entry;
            ThreatRecord& t = entry.threat;
            t.id = th.at("id").get<int>();
            t.short_name = th.at("short_name").get<std::string>();
            const auto stride = th.at("stride").get<std::string>();
            if (stride.size() != 1) throw ReportError("threat stride must be one letter");
            t.stride = stride[0];
            t.description = th.at("description").get<std::string>();
            t.mitigation = th.at("mitigation").get<std::string>();
            const ojson& cv = th.at("cvss");
            t.vector = cvss::parse_vector(cv.at("vector").get<std::string>());
            t.scores = {score_from_json(cv.at("base")), score_from_json(cv.at("temporal")),
                        score_from_json(cv.at("environmental"))};

            ThreatScore& s = entry.score;
            s.threat_id = t.id;
            s.base_mean = th.at("base_mean").get<double>();
            for (const auto& a : th.at("additions")) {
                s.additions.push_back({a.at("risk_factor").get<std::string>(), a.at("weight").get<int>()});
            }
            s.subtractions_applied = th.at("subtractions_applied").get<int>();
            s.lindunn_bonus = th.at("lindunn_bonus").get<double>();
            s.final_score = th.at("final").get<double>();
            s.zeroed_by_rule = th.at("zeroed_by_rule").get<bool>();
            r.threats.push_back(std::move(entry));
        }

        for (const auto& g : root.at("guidance")) {
            r.guidance.push_back({g.at("device").get<std::string>(), g.at("device_label").get<std::string>(),
                                  g.at("label").get<std::string>(), g.at("url").get<std::string>()});
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ReportError(std::string("malformed machine report: ") + e.what());
    } catch (const cvss::ParseError& e) {
        throw ReportError(std::string("malformed machine report: ") + e.what());
    }
}

std::vector<GuidanceEntry> guidance_links(const std::vector<std::string>& devices,
                                          const Catalog& catalog) {
    for (const auto& id : devices) {
        if (!catalog.find_device(id)) {
            throw EvaluationError(EvaluationError::Kind::UnknownDevice, id, "unknown device '" + id + "'");
        }
    }
    std::vector<GuidanceEntry> out;
    for (const auto& d : catalog.devices) {
        if (std::find(devices.begin(), devices.end(), d.id) == devices.end()) continue;
        for (const auto& link : catalog.guidance_for(d.id)) {
            out.push_back({d.id, d.label, link.label, link.url});
        }
    }
    return out;
}

}  // namespace homethreat
