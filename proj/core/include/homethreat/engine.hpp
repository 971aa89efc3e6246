#pragma once

// Composite threat scoring for a described home network.
//
// For each active threat the engine stages:
//   1. mean of the threat's base, temporal and environmental CVSS scores
//   2. + weight of every selected risk factor related to the threat
//   3. - 1 for every unselected risk factor whose mitigation covers the
//      threat, never going below zero
//   4. + privacy bonus of every active category containing the threat
//   5. threat 11 is zeroed when neither R6 nor R13 is selected
//   6. zero scores are dropped; the rest sorted descending, ties by id
//
// Every staged quantity is a multiple of 1/30, so the pipeline runs on
// integer thirtieths and converts to double once per field.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "homethreat/catalog.hpp"

namespace homethreat {

inline constexpr int kPrivateConversationLeaks = 11;

struct ModelInput {
    std::vector<std::string> devices;
    std::vector<std::string> selected_risk_factors;
    /// Informational only; never affects scores.
    std::vector<std::pair<std::string, std::string>> connections;
    std::optional<std::string> display_name;

    bool operator==(const ModelInput&) const = default;
};

struct RiskAddition {
    std::string risk_factor;
    int weight = 0;

    bool operator==(const RiskAddition&) const = default;
};

struct ThreatScore {
    int threat_id = 0;
    double base_mean = 0.0;
    std::vector<RiskAddition> additions;
    /// Subtractions that lowered a positive running value.
    int subtractions_applied = 0;
    double lindunn_bonus = 0.0;
    double final_score = 0.0;
    bool zeroed_by_rule = false;

    bool operator==(const ThreatScore&) const = default;
};

struct RankedThreat {
    ThreatScore score;
    ThreatRecord threat;

    bool operator==(const RankedThreat&) const = default;
};

struct Report {
    ModelInput input;  ///< normalized: catalog order, deduplicated
    std::vector<std::string> device_labels;  ///< parallel to input.devices
    std::vector<CategoryProfile> active_categories;
    std::vector<RankedThreat> threats;  ///< non-increasing final score, no zeros
    std::vector<GuidanceEntry> guidance;
    std::optional<std::string> generated_at;  ///< ISO-8601 UTC, unset when deterministic

    bool operator==(const Report&) const = default;
};

class EvaluationError : public std::runtime_error {
public:
    enum class Kind { UnknownDevice, UnknownRiskFactor, InvalidConnection, NotInReport };

    EvaluationError(Kind kind, std::string subject, const std::string& what);

    Kind kind() const noexcept { return kind_; }
    /// The offending id, e.g. "no-such-device".
    const std::string& subject() const noexcept { return subject_; }

private:
    Kind kind_;
    std::string subject_;
};

/// Union of the selected devices' categories, ascending.
std::set<int> active_categories(const std::vector<std::string>& devices, const Catalog& catalog);

std::set<int> active_threats(const std::set<int>& categories, const Catalog& catalog);

/// Validates ids and returns the input in canonical form: devices and risk
/// factors in catalog order without duplicates, connection pairs ordered by
/// catalog position and deduplicated.
ModelInput normalize_input(const ModelInput& input, const Catalog& catalog);

/// Scores of every active threat, including those that end at zero,
/// ascending by threat id.
std::vector<ThreatScore> evaluate_threats(const ModelInput& input, const Catalog& catalog);

/// The ranked report. generated_at is left unset.
Report score_model(const ModelInput& input, const Catalog& catalog);

struct Explanation {
    int rank = 0;
    ThreatScore score;
    ThreatRecord threat;
};

Explanation explain(int threat_id, const Report& report);

/// ISO-8601 UTC timestamp of the current time, second precision.
std::string utc_timestamp_now();

}  // namespace homethreat
