#include "homethreat/engine.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <cstdint>

#include "homethreat/report.hpp"

namespace homethreat {

namespace {

// Composite values in units of 1/30.
using Thirtieths = std::int64_t;
constexpr Thirtieths kOne = 30;

constexpr double to_double(Thirtieths v) { return static_cast<double>(v) / 30.0; }

Thirtieths cvss_sum(const cvss::ScoreTriple& s) {
    // (b + t + e) / 3 with scores in tenths == (sum of tenths) / 30
    return s.base.tenths() + s.temporal.tenths() + s.environmental.tenths();
}

Thirtieths bonus_thirtieths(const CategoryProfile& c) {
    return static_cast<Thirtieths>(c.lindunn_factors.size()) * 15;
}

bool contains(const std::vector<int>& ids, int id) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

bool contains(const std::vector<std::string>& ids, const std::string& id) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::ptrdiff_t device_position(const Catalog& catalog, const std::string& id) {
    const DeviceType* d = catalog.find_device(id);
    return d - catalog.devices.data();
}

}  // namespace

EvaluationError::EvaluationError(Kind kind, std::string subject, const std::string& what)
    : std::runtime_error(what), kind_(kind), subject_(std::move(subject)) {}

std::set<int> active_categories(const std::vector<std::string>& devices, const Catalog& catalog) {
    std::set<int> out;
    for (const auto& id : devices) {
        const DeviceType* d = catalog.find_device(id);
        if (!d) {
            throw EvaluationError(EvaluationError::Kind::UnknownDevice, id, "unknown device '" + id + "'");
        }
        out.insert(d->categories.begin(), d->categories.end());
    }
    return out;
}

std::set<int> active_threats(const std::set<int>& categories, const Catalog& catalog) {
    std::set<int> out;
    for (int id : categories) {
        if (const CategoryProfile* c = catalog.find_category(id)) {
            out.insert(c->threat_ids.begin(), c->threat_ids.end());
        }
    }
    return out;
}

ModelInput normalize_input(const ModelInput& input, const Catalog& catalog) {
    ModelInput out;
    out.display_name = input.display_name;

    for (const auto& id : input.devices) {
        if (!catalog.find_device(id)) {
            throw EvaluationError(EvaluationError::Kind::UnknownDevice, id, "unknown device '" + id + "'");
        }
    }
    for (const auto& d : catalog.devices) {
        if (contains(input.devices, d.id)) out.devices.push_back(d.id);
    }

    for (const auto& id : input.selected_risk_factors) {
        if (!catalog.find_risk_factor(id)) {
            throw EvaluationError(EvaluationError::Kind::UnknownRiskFactor, id,
                                  "unknown risk factor '" + id + "'");
        }
    }
    for (const auto& r : catalog.risk_factors) {
        if (contains(input.selected_risk_factors, r.id)) out.selected_risk_factors.push_back(r.id);
    }

    for (auto [a, b] : input.connections) {
        for (const auto* id : {&a, &b}) {
            if (!contains(out.devices, *id)) {
                throw EvaluationError(EvaluationError::Kind::InvalidConnection, *id,
                                      "connection references unselected device '" + *id + "'");
            }
        }
        if (a == b) {
            throw EvaluationError(EvaluationError::Kind::InvalidConnection, a,
                                  "device '" + a + "' cannot connect to itself");
        }
        if (device_position(catalog, a) > device_position(catalog, b)) std::swap(a, b);
        out.connections.emplace_back(a, b);
    }
    std::sort(out.connections.begin(), out.connections.end(), [&](const auto& x, const auto& y) {
        return std::pair(device_position(catalog, x.first), device_position(catalog, x.second)) <
               std::pair(device_position(catalog, y.first), device_position(catalog, y.second));
    });
    out.connections.erase(std::unique(out.connections.begin(), out.connections.end()),
                          out.connections.end());
    return out;
}

std::vector<ThreatScore> evaluate_threats(const ModelInput& input, const Catalog& catalog) {
    const ModelInput normalized = normalize_input(input, catalog);
    const std::set<int> categories = active_categories(normalized.devices, catalog);
    const std::set<int> threats = active_threats(categories, catalog);
    const auto& selected = normalized.selected_risk_factors;

    std::vector<ThreatScore> out;
    for (int id : threats) {
        const ThreatRecord* threat = catalog.find_threat(id);
        ThreatScore s;
        s.threat_id = id;

        Thirtieths value = cvss_sum(threat->scores);
        s.base_mean = to_double(value);

        for (const auto& r : catalog.risk_factors) {
            if (contains(selected, r.id) && contains(r.related_threats, id)) {
                value += kOne * r.weight;
                s.additions.push_back({r.id, r.weight});
            }
        }

        for (const auto& r : catalog.risk_factors) {
            if (!contains(selected, r.id) && contains(r.off_reductions, id)) {
                if (value > 0) ++s.subtractions_applied;
                value = std::max<Thirtieths>(0, value - kOne);
            }
        }

        Thirtieths bonus = 0;
        for (int cat : categories) {
            const CategoryProfile* c = catalog.find_category(cat);
            if (contains(c->threat_ids, id)) bonus += bonus_thirtieths(*c);
        }
        s.lindunn_bonus = to_double(bonus);
        value += bonus;

        if (id == kPrivateConversationLeaks && !contains(selected, std::string("R6")) &&
            !contains(selected, std::string("R13"))) {
            value = 0;
            s.zeroed_by_rule = true;
        }

        s.final_score = to_double(value);
        out.push_back(std::move(s));
    }
    return out;
}

Report score_model(const ModelInput& input, const Catalog& catalog) {
    Report report;
    report.input = normalize_input(input, catalog);
    for (const auto& id : report.input.devices) {
        report.device_labels.push_back(catalog.find_device(id)->label);
    }

    for (int id : active_categories(report.input.devices, catalog)) {
        report.active_categories.push_back(*catalog.find_category(id));
    }

    for (auto& s : evaluate_threats(report.input, catalog)) {
        if (s.final_score <= 0.0) continue;
        const ThreatRecord& record = *catalog.find_threat(s.threat_id);
        report.threats.push_back({std::move(s), record});
    }
    std::stable_sort(report.threats.begin(), report.threats.end(),
                     [](const RankedThreat& a, const RankedThreat& b) {
                         if (a.score.final_score != b.score.final_score) {
                             return a.score.final_score > b.score.final_score;
                         }
                         return a.score.threat_id < b.score.threat_id;
                     });

    report.guidance = guidance_links(report.input.devices, catalog);
    return report;
}

Explanation explain(int threat_id, const Report& report) {
    for (std::size_t i = 0; i < report.threats.size(); ++i) {
        const auto& entry = report.threats[i];
        if (entry.score.threat_id == threat_id) {
            return {static_cast<int>(i + 1), entry.score, entry.threat};
        }
    }
    throw EvaluationError(EvaluationError::Kind::NotInReport, std::to_string(threat_id),
                          "threat " + std::to_string(threat_id) + " is not in the report");
}

std::string utc_timestamp_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

}  // namespace homethreat
