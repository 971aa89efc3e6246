#include "homethreat/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "homethreat/catalog.hpp"
#include "homethreat/engine.hpp"
#include "homethreat/report.hpp"

#ifndef HOMETHREAT_VERSION
#define HOMETHREAT_VERSION "unknown"
#endif

namespace homethreat::cli {

namespace {

// Raised for bad input that CLI11 itself cannot detect.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LookupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in{std::string(s)};
    while (std::getline(in, item, sep)) {
        if (auto t = trim(item); !t.empty()) out.push_back(std::move(t));
    }
    return out;
}

std::vector<std::string> non_empty(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& s : items) {
        if (auto t = trim(s); !t.empty()) out.push_back(std::move(t));
    }
    return out;
}

std::string_view stride_name(char letter) {
    switch (letter) {
        case 'S': return "Spoofing";
        case 'T': return "Tampering";
        case 'R': return "Repudiation";
        case 'I': return "Information disclosure";
        case 'D': return "Denial of service";
        case 'E': return "Elevation of privilege";
    }
    return "?";
}

std::string score_with_band(cvss::Score s) {
    return s.str() + " (" + std::string(cvss::to_string(cvss::severity(s))) + ")";
}

struct CatalogHandle {
    std::optional<Catalog> owned;
    const Catalog* ptr = nullptr;
    const Catalog& get() const { return *ptr; }
};

CatalogHandle open_catalog(const std::string& path) {
    CatalogHandle h;
    if (path.empty()) {
        h.ptr = &default_catalog();
    } else {
        h.owned = load_catalog_file(path);
        h.ptr = &*h.owned;
    }
    return h;
}

std::vector<std::pair<std::string, std::string>> parse_connections(const std::vector<std::string>& raw) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& item : raw) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) {
            throw UsageError("--connect expects DEVICE:DEVICE, got '" + item + "'");
        }
        out.emplace_back(parts[0], parts[1]);
    }
    return out;
}

// Interactive flow: intro, devices, optional name, questions, results.
class Wizard {
public:
    Wizard(const Catalog& catalog, std::istream& in, std::ostream& out) : c_(catalog), in_(in), out_(out) {}

    ModelInput collect() {
        out_ << "Home threat model\n\n"
             << "Describe the smart devices in your home and answer a few yes/no questions.\n"
             << "You will get a ranked list of threats with steps you can take against each.\n"
             << "Everything you enter stays on this computer.\n\n";

        ModelInput input;
        input.devices = ask_devices();
        out_ << "\nName to show on the report (optional, press Enter to skip): " << std::flush;
        if (auto name = trim(read_line()); !name.empty()) input.display_name = name;

        const auto threats = active_threats(active_categories(input.devices, c_), c_);
        std::vector<const RiskFactor*> relevant;
        for (const auto& r : c_.risk_factors) {
            const bool hit = std::any_of(r.related_threats.begin(), r.related_threats.end(),
                                         [&](int t) { return threats.count(t) > 0; });
            if (hit) relevant.push_back(&r);
        }
        if (!relevant.empty()) {
            out_ << "\nStep 2 of 3: how are your devices set up? Answer y or n.\n";
            for (const RiskFactor* r : relevant) {
                if (ask_yes_no(r->id + ". " + r->question)) input.selected_risk_factors.push_back(r->id);
            }
        }
        out_ << "\nStep 3 of 3: results\n\n";
        return input;
    }

private:
    std::string read_line() {
        std::string line;
        if (!std::getline(in_, line)) throw UsageError("input ended before the questions were finished");
        return line;
    }

    std::vector<std::string> ask_devices() {
        out_ << "Step 1 of 3: which of these devices do you have?\n";
        for (std::size_t i = 0; i < c_.devices.size(); ++i) {
            out_ << std::setw(4) << i + 1 << ". " << c_.devices[i].label << "\n";
        }
        for (;;) {
            out_ << "Enter the numbers separated by commas (Enter for none): " << std::flush;
            std::vector<std::string> chosen;
            std::string bad;
            for (const auto& token : split(read_line(), ',')) {
                if (const DeviceType* d = c_.find_device(token)) {
                    chosen.push_back(d->id);
                    continue;
                }
                char* end = nullptr;
                const long n = std::strtol(token.c_str(), &end, 10);
                if (*end == '\0' && n >= 1 && n <= static_cast<long>(c_.devices.size())) {
                    chosen.push_back(c_.devices[static_cast<std::size_t>(n - 1)].id);
                } else {
                    bad = token;
                    break;
                }
            }
            if (bad.empty()) return chosen;
            out_ << "'" << bad << "' is not one of the listed devices. Please try again.\n";
        }
    }

    bool ask_yes_no(const std::string& question) {
        for (;;) {
            out_ << question << " [y/n]: " << std::flush;
            const std::string answer = lower(trim(read_line()));
            if (answer == "y" || answer == "yes") return true;
            if (answer == "n" || answer == "no") return false;
            out_ << "Please answer y or n.\n";
        }
    }

    const Catalog& c_;
    std::istream& in_;
    std::ostream& out_;
};

struct Options {
    std::string catalog_path;

    std::vector<std::string> devices;
    std::vector<std::string> risk_factors;
    std::vector<std::string> connections;
    std::string format = "text";
    std::string display_name;
    bool interactive = false;
    bool deterministic = false;

    std::string list_kind;
    int threat = 0;
    std::string term;
};

int do_model(const Options& o, std::istream& in, std::ostream& out, std::ostream& err, const Environment& env) {
    const auto format = report_format_from_string(o.format);
    if (!format) throw UsageError("unknown format '" + o.format + "'");
    const CatalogHandle catalog = open_catalog(o.catalog_path);

    ModelInput input;
    if (o.interactive) {
        std::ostream& prompts = *format == ReportFormat::Machine ? err : out;
        input = Wizard(catalog.get(), in, prompts).collect();
    } else {
        input.devices = non_empty(o.devices);
        input.selected_risk_factors = non_empty(o.risk_factors);
        input.connections = parse_connections(o.connections);
        if (!o.display_name.empty()) input.display_name = o.display_name;
    }

    Report report = score_model(input, catalog.get());
    if (!o.deterministic) report.generated_at = env.clock ? env.clock() : utc_timestamp_now();

    RenderOptions ro;
    ro.color = env.stdout_is_tty && !env.no_color && *format == ReportFormat::Text;
    const RenderedReport rendered = render(report, *format, ro);
    out << rendered.body;
    if (!rendered.body.empty() && rendered.body.back() != '\n') out << "\n";
    for (const auto& w : rendered.warnings) err << "warning: " << w << "\n";
    return kSuccess;
}

int do_list(const Options& o, std::ostream& out) {
    const CatalogHandle h = open_catalog(o.catalog_path);
    const Catalog& c = h.get();
    if (o.list_kind == "devices") {
        for (const auto& d : c.devices) out << std::left << std::setw(24) << d.id << d.label << "\n";
    } else if (o.list_kind == "risk-factors") {
        for (const auto& r : c.risk_factors) {
            out << std::left << std::setw(5) << r.id << "weight " << r.weight << "  " << r.question << "\n";
        }
    } else {
        for (const auto& t : c.threats) {
            out << std::right << std::setw(2) << t.id << "  " << t.stride << "  " << std::left << std::setw(30)
                << t.short_name << t.scores.base.str() << " / " << t.scores.temporal.str() << " / "
                << t.scores.environmental.str() << "\n";
        }
    }
    return kSuccess;
}

int do_explain(const Options& o, std::ostream& out) {
    const CatalogHandle h = open_catalog(o.catalog_path);
    const Catalog& c = h.get();
    const ThreatRecord* t = c.find_threat(o.threat);
    if (!t) throw LookupError("unknown threat " + std::to_string(o.threat));

    out << t->short_name << " (threat " << t->id << ")\n"
        << "Type: " << stride_name(t->stride) << " (" << t->stride << ")\n"
        << "CVSS: " << cvss::canonical_string(t->vector) << "\n"
        << "  base " << score_with_band(t->scores.base) << ", temporal " << score_with_band(t->scores.temporal)
        << ", environmental " << score_with_band(t->scores.environmental) << "\n"
        << "What could happen: " << t->description << "\n"
        << "What you can do: " << t->mitigation << "\n";

    const auto devices = non_empty(o.devices);
    if (devices.empty()) return kSuccess;

    ModelInput input;
    input.devices = devices;
    input.selected_risk_factors = non_empty(o.risk_factors);
    const Report report = score_model(input, c);
    const Explanation e = explain(o.threat, report);
    out << "In this model: rank " << e.rank << " of " << report.threats.size() << ", score "
        << format_score(e.score.final_score) << "\n"
        << "  CVSS mean " << format_score(e.score.base_mean);
    for (const auto& a : e.score.additions) out << ", +" << a.weight << " " << a.risk_factor;
    if (e.score.subtractions_applied > 0) out << ", -" << e.score.subtractions_applied << " mitigations in place";
    if (e.score.lindunn_bonus > 0) out << ", +" << format_score(e.score.lindunn_bonus) << " privacy";
    out << "\n";
    return kSuccess;
}

int do_glossary(const Options& o, std::ostream& out) {
    const CatalogHandle h = open_catalog(o.catalog_path);
    const Catalog& c = h.get();
    if (!o.term.empty()) {
        const GlossaryEntry* g = c.find_glossary(o.term);
        if (!g) throw LookupError("no glossary entry for '" + o.term + "'");
        out << g->term << "\n  " << g->definition << "\n";
        return kSuccess;
    }
    for (const auto& g : c.glossary) out << g.term << "\n  " << g.definition << "\n";
    return kSuccess;
}

int do_validate(const Options& o, std::ostream& out, std::ostream& err) {
    const std::string document =
        o.catalog_path.empty() ? std::string(default_catalog_document()) : read_catalog_file(o.catalog_path);
    const Catalog c = parse_catalog(document);
    const auto violations = validate(c);
    if (violations.empty()) {
        out << "catalog OK: " << c.threats.size() << " threats, " << c.devices.size() << " devices, "
            << c.risk_factors.size() << " risk factors, " << c.categories.size() << " categories\n";
        return kSuccess;
    }
    for (const auto& v : violations) out << v.str() << "\n";
    err << "error: catalog has " << violations.size() << " violation" << (violations.size() == 1 ? "" : "s")
        << "\n";
    return kCatalogError;
}

}  // namespace

Environment detect_environment() {
    Environment env;
    env.stdout_is_tty = ::isatty(STDOUT_FILENO) == 1;
    env.no_color = std::getenv("NO_COLOR") != nullptr;
    return env;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        const Environment& env) {
    CLI::App app{"Rank the security and privacy threats to a smart home.", "homethreat"};
    app.set_version_flag("--version", HOMETHREAT_VERSION);
    app.require_subcommand(1);
    app.fallthrough(false);

    Options o;
    const auto add_catalog = [&](CLI::App* sub) {
        sub->add_option("--catalog", o.catalog_path, "Catalog JSON file to use instead of the built-in one");
    };

    CLI::App* model = app.add_subcommand("model", "Score a home and print the ranked report");
    model->add_option("--devices", o.devices, "Comma-separated device ids")->delimiter(',');
    model->add_option("--risk-factors", o.risk_factors, "Comma-separated ids of risk factors that apply")
        ->delimiter(',');
    model->add_option("--connect", o.connections, "Connected device pair A:B (repeatable, informational)");
    model->add_option("--format", o.format, "text, markdown or machine")
        ->check(CLI::IsMember({"text", "markdown", "machine"}));
    model->add_option("--display-name", o.display_name, "Name shown on the report");
    auto* interactive = model->add_flag("--interactive", o.interactive, "Ask questions step by step");
    model->add_flag("--deterministic", o.deterministic, "Omit the timestamp");
    model->get_option("--devices")->excludes(interactive);
    model->get_option("--risk-factors")->excludes(interactive);
    add_catalog(model);

    CLI::App* list = app.add_subcommand("list", "List catalog entries");
    list->add_option("kind", o.list_kind, "devices, risk-factors or threats")
        ->required()
        ->check(CLI::IsMember({"devices", "risk-factors", "threats"}));
    add_catalog(list);

    CLI::App* explain_cmd = app.add_subcommand("explain", "Describe one threat and its mitigation");
    explain_cmd->add_option("--threat", o.threat, "Threat id")->required();
    explain_cmd->add_option("--devices", o.devices, "Also show its rank for these devices")->delimiter(',');
    explain_cmd->add_option("--risk-factors", o.risk_factors, "Risk factors for the ranking")->delimiter(',');
    add_catalog(explain_cmd);

    CLI::App* glossary = app.add_subcommand("glossary", "Explain technical terms");
    glossary->add_option("term", o.term, "Term to look up");
    add_catalog(glossary);

    CLI::App* validate_cmd = app.add_subcommand("validate", "Check a catalog file for consistency");
    add_catalog(validate_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }

    try {
        if (*model) return do_model(o, in, out, err, env);
        if (*list) return do_list(o, out);
        if (*explain_cmd) return do_explain(o, out);
        if (*glossary) return do_glossary(o, out);
        return do_validate(o, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const CatalogError& e) {
        err << "error: catalog: " << e.what() << "\n";
        return kCatalogError;
    } catch (const EvaluationError& e) {
        err << "error: " << e.what() << "\n";
        return kEvaluationError;
    } catch (const LookupError& e) {
        err << "error: " << e.what() << "\n";
        return kEvaluationError;
    } catch (const ReportError& e) {
        err << "error: " << e.what() << "\n";
        return kEvaluationError;
    }
}

}  // namespace homethreat::cli
