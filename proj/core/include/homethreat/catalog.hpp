#pragma once

// Threat knowledge base: threats, device types, risk factors, device
// categories with their privacy factors, glossary and guidance links.
//
// A Catalog is loaded from one JSON document, validated, and treated as an
// immutable value afterwards.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "homethreat/cvss.hpp"

namespace homethreat {

inline constexpr int kCatalogSchemaVersion = 1;
inline constexpr int kThreatCount = 16;
inline constexpr int kCategoryCount = 5;

struct ThreatRecord {
    int id = 0;
    char stride = 'S';
    std::string short_name;
    std::string description;
    std::string mitigation;
    cvss::CvssVector vector;
    cvss::ScoreTriple scores;  ///< Always cvss::score(vector).

    bool operator==(const ThreatRecord&) const = default;
};

struct DeviceType {
    std::string id;
    std::string label;
    std::vector<int> categories;  ///< Sorted, subset of 1..5.

    bool operator==(const DeviceType&) const = default;
};

struct RiskFactor {
    std::string id;  ///< "R1".."R14"
    int weight = 1;
    std::string question;
    std::vector<int> related_threats;
    /// Threats reduced by one when this factor is NOT selected.
    std::vector<int> off_reductions;
    std::string justification;

    bool operator==(const RiskFactor&) const = default;
};

struct CategoryProfile {
    int id = 0;
    std::string description;
    std::vector<int> threat_ids;
    std::vector<std::string> lindunn_factors;
    double bonus = 0.0;  ///< 0.5 per privacy factor.

    bool operator==(const CategoryProfile&) const = default;
};

struct GlossaryEntry {
    std::string term;
    std::string definition;

    bool operator==(const GlossaryEntry&) const = default;
};

struct GuidanceLink {
    std::string label;
    std::string url;

    bool operator==(const GuidanceLink&) const = default;
};

struct DeviceGuidance {
    std::string device_id;
    std::vector<GuidanceLink> links;

    bool operator==(const DeviceGuidance&) const = default;
};

/// One rendered guidance row: a curated link for a selected device.
struct GuidanceEntry {
    std::string device_id;
    std::string device_label;
    std::string label;
    std::string url;

    bool operator==(const GuidanceEntry&) const = default;
};

struct Catalog {
    int schema_version = kCatalogSchemaVersion;
    std::vector<ThreatRecord> threats;        ///< ascending id
    std::vector<DeviceType> devices;          ///< document order
    std::vector<RiskFactor> risk_factors;     ///< document order (R1..R14)
    std::vector<CategoryProfile> categories;  ///< ascending id
    std::vector<GlossaryEntry> glossary;      ///< case-insensitive alphabetical
    std::vector<DeviceGuidance> guidance_links;

    const ThreatRecord* find_threat(int id) const;
    const DeviceType* find_device(std::string_view id) const;
    const RiskFactor* find_risk_factor(std::string_view id) const;
    const CategoryProfile* find_category(int id) const;
    /// Case-insensitive term match.
    const GlossaryEntry* find_glossary(std::string_view term) const;
    /// Empty when the device has no curated links.
    const std::vector<GuidanceLink>& guidance_for(std::string_view device_id) const;

    bool operator==(const Catalog&) const = default;
};

class CatalogError : public std::runtime_error {
public:
    enum class Kind { Schema, Integrity, Vector };

    CatalogError(Kind kind, const std::string& what);
    CatalogError(cvss::ParseErrc vector_error, const std::string& what);

    Kind kind() const noexcept { return kind_; }
    /// Set for Kind::Vector.
    std::optional<cvss::ParseErrc> vector_error() const noexcept { return vector_error_; }

private:
    Kind kind_;
    std::optional<cvss::ParseErrc> vector_error_;
};

std::string_view to_string(CatalogError::Kind kind);

/// Parses and scores a document without the integrity checks of validate().
/// Schema and vector errors still throw.
Catalog parse_catalog(std::string_view document);

/// Parses, scores and validates a catalog document. Any validation
/// violation is raised as an Integrity error naming the first violation.
Catalog load_catalog(std::string_view document);
Catalog load_catalog_file(const std::string& path);
/// Raw file contents; a Schema error if unreadable.
std::string read_catalog_file(const std::string& path);

/// The document compiled into the library.
std::string_view default_catalog_document();
/// Loaded once on first use.
const Catalog& default_catalog();

struct Violation {
    std::string entity;  ///< e.g. "threat 3", "R6", "category 3"
    std::string rule;

    std::string str() const { return entity + ": " + rule; }
    bool operator==(const Violation&) const = default;
};

/// Checks every catalog invariant, including agreement with the reference
/// threat/category/risk-factor tables. Empty result means valid.
std::vector<Violation> validate(const Catalog& c);

enum class EntityKind { Threat, Device, RiskFactor, Category, Glossary };

std::optional<EntityKind> entity_kind_from_string(std::string_view name);

using EntityRef = std::variant<const ThreatRecord*, const DeviceType*, const RiskFactor*,
                               const CategoryProfile*, const GlossaryEntry*>;

/// Numeric kinds (threat, category) parse `id` as an integer; a malformed
/// number is simply absent.
std::optional<EntityRef> lookup(const Catalog& c, EntityKind kind, std::string_view id);

/// Published table rows that disagree with the CVSS v3.1 equations.
struct ConformanceNote {
    int threat = 0;
    std::string vector;
    cvss::ScoreTriple printed;
    cvss::ScoreTriple computed;
    std::string reason;
};

const std::vector<ConformanceNote>& conformance_notes();

}  // namespace homethreat
