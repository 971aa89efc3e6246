#include "homethreat/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <initializer_list>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "reference_tables.hpp"

namespace homethreat {

namespace detail {
std::string_view embedded_catalog();
std::string_view embedded_conformance_notes();
}  // namespace detail

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) {
    throw CatalogError(CatalogError::Kind::Schema, what);
}

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) schema_error(where + ": expected an object");
}

// Exactly the listed keys, no more and no fewer.
void require_keys(const json& j, std::initializer_list<std::string_view> keys,
                  const std::string& where) {
    require_object(j, where);
    for (auto key : keys) {
        if (!j.contains(std::string(key))) schema_error(where + ": missing key '" + std::string(key) + "'");
    }
    for (const auto& [key, _] : j.items()) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            schema_error(where + ": unexpected key '" + key + "'");
        }
    }
}

const json& array_at(const json& j, std::string_view key, const std::string& where) {
    const json& v = j.at(std::string(key));
    if (!v.is_array()) schema_error(where + "." + std::string(key) + ": expected an array");
    return v;
}

std::string string_at(const json& j, std::string_view key, const std::string& where) {
    const json& v = j.at(std::string(key));
    if (!v.is_string()) schema_error(where + "." + std::string(key) + ": expected a string");
    return v.get<std::string>();
}

int int_at(const json& j, std::string_view key, const std::string& where) {
    const json& v = j.at(std::string(key));
    if (!v.is_number_integer()) schema_error(where + "." + std::string(key) + ": expected an integer");
    return v.get<int>();
}

std::vector<int> int_list(const json& j, std::string_view key, const std::string& where) {
    std::vector<int> out;
    for (const json& v : array_at(j, key, where)) {
        if (!v.is_number_integer()) {
            schema_error(where + "." + std::string(key) + ": expected integers");
        }
        out.push_back(v.get<int>());
    }
    return out;
}

std::vector<std::string> string_list(const json& j, std::string_view key, const std::string& where) {
    std::vector<std::string> out;
    for (const json& v : array_at(j, key, where)) {
        if (!v.is_string()) schema_error(where + "." + std::string(key) + ": expected strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

ThreatRecord parse_threat(const json& j, std::size_t index) {
    const std::string where = "threats[" + std::to_string(index) + "]";
    require_keys(j, {"id", "stride", "short_name", "description", "mitigation", "vector"}, where);

    ThreatRecord t;
    t.id = int_at(j, "id", where);
    const std::string stride = string_at(j, "stride", where);
    if (stride.size() != 1) schema_error(where + ".stride: expected a single letter");
    t.stride = stride[0];
    t.short_name = string_at(j, "short_name", where);
    t.description = string_at(j, "description", where);
    t.mitigation = string_at(j, "mitigation", where);
    const std::string vector = string_at(j, "vector", where);
    try {
        t.vector = cvss::parse_vector(vector);
    } catch (const cvss::ParseError& e) {
        throw CatalogError(e.code(), "threat " + std::to_string(t.id) + ": " + e.what());
    }
    t.scores = cvss::score(t.vector);
    return t;
}

DeviceType parse_device(const json& j, std::size_t index) {
    const std::string where = "devices[" + std::to_string(index) + "]";
    require_keys(j, {"id", "label", "categories"}, where);
    DeviceType d;
    d.id = string_at(j, "id", where);
    d.label = string_at(j, "label", where);
    d.categories = int_list(j, "categories", where);
    std::sort(d.categories.begin(), d.categories.end());
    return d;
}

RiskFactor parse_risk_factor(const json& j, std::size_t index) {
    const std::string where = "risk_factors[" + std::to_string(index) + "]";
    require_keys(j, {"id", "weight", "question", "related_threats", "off_reductions", "justification"},
                 where);
    RiskFactor r;
    r.id = string_at(j, "id", where);
    r.weight = int_at(j, "weight", where);
    r.question = string_at(j, "question", where);
    r.related_threats = int_list(j, "related_threats", where);
    r.off_reductions = int_list(j, "off_reductions", where);
    r.justification = string_at(j, "justification", where);
    std::sort(r.related_threats.begin(), r.related_threats.end());
    std::sort(r.off_reductions.begin(), r.off_reductions.end());
    return r;
}

CategoryProfile parse_category(const json& j, std::size_t index) {
    const std::string where = "categories[" + std::to_string(index) + "]";
    require_keys(j, {"id", "description", "threat_ids", "lindunn_factors"}, where);
    CategoryProfile c;
    c.id = int_at(j, "id", where);
    c.description = string_at(j, "description", where);
    c.threat_ids = int_list(j, "threat_ids", where);
    std::sort(c.threat_ids.begin(), c.threat_ids.end());
    c.lindunn_factors = string_list(j, "lindunn_factors", where);
    c.bonus = 0.5 * static_cast<double>(c.lindunn_factors.size());
    return c;
}

template <class T, class Id>
std::vector<std::pair<Id, int>> duplicates_of(const std::vector<T>& items, Id T::*field) {
    std::vector<std::pair<Id, int>> out;
    std::vector<Id> seen;
    for (const auto& item : items) {
        const Id& id = item.*field;
        if (std::find(seen.begin(), seen.end(), id) != seen.end()) {
            if (std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == id; }) ==
                out.end()) {
                out.emplace_back(id, 2);
            }
        } else {
            seen.push_back(id);
        }
    }
    return out;
}

bool same_set(std::vector<int> a, std::span<const int> b) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::vector<int> bv(b.begin(), b.end());
    std::sort(bv.begin(), bv.end());
    return a == bv;
}

std::string join(const std::vector<int>& ids) {
    std::string out = "{";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(ids[i]);
    }
    return out + "}";
}

std::string join(std::span<const int> ids) { return join(std::vector<int>(ids.begin(), ids.end())); }

bool valid_threat_id(int id) { return id >= 1 && id <= kThreatCount; }

void check_threat_refs(const std::vector<int>& ids, const std::string& entity,
                       const std::string& field, std::vector<Violation>& out) {
    for (int id : ids) {
        if (!valid_threat_id(id)) {
            out.push_back({entity, field + " references unknown threat " + std::to_string(id)});
        }
    }
}

}  // namespace

CatalogError::CatalogError(Kind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

CatalogError::CatalogError(cvss::ParseErrc vector_error, const std::string& what)
    : std::runtime_error(std::string(to_string(Kind::Vector)) + ": " + what),
      kind_(Kind::Vector),
      vector_error_(vector_error) {}

std::string_view to_string(CatalogError::Kind kind) {
    switch (kind) {
        case CatalogError::Kind::Schema: return "SchemaError";
        case CatalogError::Kind::Integrity: return "IntegrityError";
        case CatalogError::Kind::Vector: return "VectorError";
    }
    return "CatalogError";
}

const ThreatRecord* Catalog::find_threat(int id) const {
    auto it = std::find_if(threats.begin(), threats.end(), [&](const auto& t) { return t.id == id; });
    return it == threats.end() ? nullptr : &*it;
}

const DeviceType* Catalog::find_device(std::string_view id) const {
    auto it = std::find_if(devices.begin(), devices.end(), [&](const auto& d) { return d.id == id; });
    return it == devices.end() ? nullptr : &*it;
}

const RiskFactor* Catalog::find_risk_factor(std::string_view id) const {
    auto it = std::find_if(risk_factors.begin(), risk_factors.end(),
                           [&](const auto& r) { return r.id == id; });
    return it == risk_factors.end() ? nullptr : &*it;
}

const CategoryProfile* Catalog::find_category(int id) const {
    auto it = std::find_if(categories.begin(), categories.end(),
                           [&](const auto& c) { return c.id == id; });
    return it == categories.end() ? nullptr : &*it;
}

const GlossaryEntry* Catalog::find_glossary(std::string_view term) const {
    const std::string needle = lower(term);
    auto it = std::find_if(glossary.begin(), glossary.end(),
                           [&](const auto& g) { return lower(g.term) == needle; });
    return it == glossary.end() ? nullptr : &*it;
}

const std::vector<GuidanceLink>& Catalog::guidance_for(std::string_view device_id) const {
    static const std::vector<GuidanceLink> kEmpty;
    auto it = std::find_if(guidance_links.begin(), guidance_links.end(),
                           [&](const auto& g) { return g.device_id == device_id; });
    return it == guidance_links.end() ? kEmpty : it->links;
}

Catalog parse_catalog(std::string_view document) {
    json root;
    try {
        root = json::parse(document);
    } catch (const json::parse_error& e) {
        schema_error(std::string("document is not valid JSON: ") + e.what());
    }
    require_keys(root,
                 {"schema_version", "threats", "devices", "risk_factors", "categories", "glossary",
                  "guidance_links"},
                 "catalog");

    Catalog c;
    c.schema_version = int_at(root, "schema_version", "catalog");
    if (c.schema_version != kCatalogSchemaVersion) {
        schema_error("unsupported schema_version " + std::to_string(c.schema_version));
    }

    const json& threats = array_at(root, "threats", "catalog");
    for (std::size_t i = 0; i < threats.size(); ++i) c.threats.push_back(parse_threat(threats[i], i));
    std::stable_sort(c.threats.begin(), c.threats.end(),
                     [](const auto& a, const auto& b) { return a.id < b.id; });

    const json& devices = array_at(root, "devices", "catalog");
    for (std::size_t i = 0; i < devices.size(); ++i) c.devices.push_back(parse_device(devices[i], i));

    const json& factors = array_at(root, "risk_factors", "catalog");
    for (std::size_t i = 0; i < factors.size(); ++i) {
        c.risk_factors.push_back(parse_risk_factor(factors[i], i));
    }

    const json& categories = array_at(root, "categories", "catalog");
    for (std::size_t i = 0; i < categories.size(); ++i) {
        c.categories.push_back(parse_category(categories[i], i));
    }
    std::stable_sort(c.categories.begin(), c.categories.end(),
                     [](const auto& a, const auto& b) { return a.id < b.id; });

    const json& glossary = root.at("glossary");
    require_object(glossary, "catalog.glossary");
    for (const auto& [term, definition] : glossary.items()) {
        if (!definition.is_string()) schema_error("glossary." + term + ": expected a string");
        c.glossary.push_back({term, definition.get<std::string>()});
    }
    std::stable_sort(c.glossary.begin(), c.glossary.end(),
                     [](const auto& a, const auto& b) { return lower(a.term) < lower(b.term); });

    const json& guidance = root.at("guidance_links");
    require_object(guidance, "catalog.guidance_links");
    for (const auto& [device, links] : guidance.items()) {
        const std::string where = "guidance_links." + device;
        if (!links.is_array()) schema_error(where + ": expected an array");
        DeviceGuidance entry{device, {}};
        for (std::size_t i = 0; i < links.size(); ++i) {
            const std::string item = where + "[" + std::to_string(i) + "]";
            require_keys(links[i], {"label", "url"}, item);
            entry.links.push_back({string_at(links[i], "label", item), string_at(links[i], "url", item)});
        }
        c.guidance_links.push_back(std::move(entry));
    }
    return c;
}

Catalog load_catalog(std::string_view document) {
    Catalog c = parse_catalog(document);
    if (auto violations = validate(c); !violations.empty()) {
        std::string what = violations.front().str();
        if (violations.size() > 1) {
            what += " (and " + std::to_string(violations.size() - 1) + " more)";
        }
        throw CatalogError(CatalogError::Kind::Integrity, what);
    }
    return c;
}

std::string read_catalog_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CatalogError(CatalogError::Kind::Schema, "cannot read catalog file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Catalog load_catalog_file(const std::string& path) { return load_catalog(read_catalog_file(path)); }

std::string_view default_catalog_document() { return detail::embedded_catalog(); }

const Catalog& default_catalog() {
    static const Catalog catalog = load_catalog(default_catalog_document());
    return catalog;
}

std::vector<Violation> validate(const Catalog& c) {
    std::vector<Violation> out;

    if (c.schema_version != kCatalogSchemaVersion) {
        out.push_back({"catalog", "schema_version must be " + std::to_string(kCatalogSchemaVersion)});
    }

    // Threats. A missing id is reported once here; references to ids inside
    // 1..16 are not additionally reported as dangling.
    for (const auto& [id, _] : duplicates_of(c.threats, &ThreatRecord::id)) {
        out.push_back({"threat " + std::to_string(id), "duplicate id"});
    }
    for (const auto& ref : reference::threats()) {
        if (!c.find_threat(ref.id)) {
            out.push_back({"threats", "missing threat " + std::to_string(ref.id)});
        }
    }
    static const std::regex kChained(R"(\b[Ss]ee (\d+|[a-z]+) above\b)");
    for (const auto& t : c.threats) {
        const std::string entity = "threat " + std::to_string(t.id);
        if (!valid_threat_id(t.id)) {
            out.push_back({entity, "id outside 1..16"});
            continue;
        }
        const auto& ref = reference::threats()[static_cast<std::size_t>(t.id - 1)];
        if (std::string_view("STIDE").find(t.stride) == std::string_view::npos) {
            out.push_back({entity, std::string("STRIDE letter '") + t.stride + "' not one of S,T,I,D,E"});
        } else if (t.stride != ref.stride) {
            out.push_back({entity, std::string("STRIDE letter must be ") + ref.stride});
        }
        if (t.short_name != ref.short_name) {
            out.push_back({entity, "short_name must be '" + std::string(ref.short_name) + "'"});
        }
        if (t.scores != cvss::score(t.vector)) {
            out.push_back({entity, "cached scores differ from the CVSS equations"});
        }
        if (t.description.empty()) out.push_back({entity, "description is empty"});
        if (t.mitigation.empty()) out.push_back({entity, "mitigation is empty"});
        if (std::regex_search(t.mitigation, kChained)) {
            out.push_back({entity, "mitigation contains an unresolved cross-reference"});
        }
    }

    // Devices
    for (const auto& [id, _] : duplicates_of(c.devices, &DeviceType::id)) {
        out.push_back({"device " + id, "duplicate id"});
    }
    for (const auto& ref : reference::devices()) {
        const DeviceType* d = c.find_device(ref.id);
        if (!d) {
            out.push_back({"devices", "missing device " + std::string(ref.id)});
        } else if (!same_set(d->categories, ref.categories)) {
            out.push_back({"device " + d->id, "categories must be " + join(ref.categories)});
        }
    }
    for (const auto& d : c.devices) {
        const bool known = std::any_of(reference::devices().begin(), reference::devices().end(),
                                       [&](const auto& r) { return r.id == d.id; });
        if (!known) out.push_back({"device " + d.id, "not a recognised device type"});
        if (d.label.empty()) out.push_back({"device " + d.id, "label is empty"});
        for (int cat : d.categories) {
            if (cat < 1 || cat > kCategoryCount) {
                out.push_back({"device " + d.id, "references unknown category " + std::to_string(cat)});
            }
        }
    }

    // Risk factors
    for (const auto& [id, _] : duplicates_of(c.risk_factors, &RiskFactor::id)) {
        out.push_back({id, "duplicate id"});
    }
    std::set<int> related_union;
    for (const auto& r : c.risk_factors) {
        related_union.insert(r.related_threats.begin(), r.related_threats.end());
    }
    for (const auto& ref : reference::risk_factors()) {
        if (!c.find_risk_factor(ref.id)) {
            out.push_back({"risk_factors", "missing risk factor " + std::string(ref.id)});
        }
    }
    for (const auto& r : c.risk_factors) {
        auto ref = std::find_if(reference::risk_factors().begin(), reference::risk_factors().end(),
                                [&](const auto& x) { return x.id == r.id; });
        if (ref == reference::risk_factors().end()) {
            out.push_back({r.id, "not a recognised risk factor"});
            continue;
        }
        if (r.weight < 1 || r.weight > 3) {
            out.push_back({r.id, "weight must be 1, 2 or 3"});
        } else if (r.weight != ref->weight) {
            out.push_back({r.id, "weight must be " + std::to_string(ref->weight)});
        }
        check_threat_refs(r.related_threats, r.id, "related_threats", out);
        check_threat_refs(r.off_reductions, r.id, "off_reductions", out);
        if (!same_set(r.related_threats, ref->related)) {
            out.push_back({r.id, "related_threats must be " + join(ref->related)});
        }
        if (!same_set(r.off_reductions, ref->off_reductions)) {
            out.push_back({r.id, "off_reductions must be " + join(ref->off_reductions)});
        }
        for (int t : r.off_reductions) {
            if (valid_threat_id(t) && !related_union.contains(t)) {
                out.push_back({r.id, "off_reductions threat " + std::to_string(t) +
                                         " is not related to any risk factor"});
            }
        }
        if (r.question.empty()) out.push_back({r.id, "question is empty"});
    }

    // Categories
    for (const auto& [id, _] : duplicates_of(c.categories, &CategoryProfile::id)) {
        out.push_back({"category " + std::to_string(id), "duplicate id"});
    }
    std::set<int> covered;
    for (const auto& ref : reference::categories()) {
        if (!c.find_category(ref.id)) {
            out.push_back({"categories", "missing category " + std::to_string(ref.id)});
        }
    }
    for (const auto& cat : c.categories) {
        const std::string entity = "category " + std::to_string(cat.id);
        covered.insert(cat.threat_ids.begin(), cat.threat_ids.end());
        if (cat.id < 1 || cat.id > kCategoryCount) {
            out.push_back({entity, "id outside 1..5"});
            continue;
        }
        const auto& ref = reference::categories()[static_cast<std::size_t>(cat.id - 1)];
        check_threat_refs(cat.threat_ids, entity, "threat_ids", out);
        if (!same_set(cat.threat_ids, ref.threats)) {
            out.push_back({entity, "threat_ids must be " + join(ref.threats)});
        }
        if (static_cast<int>(cat.lindunn_factors.size()) != ref.factor_count) {
            out.push_back({entity, "must list " + std::to_string(ref.factor_count) +
                                       " LINDUNN GO factors"});
        }
        if (cat.bonus != 0.5 * static_cast<double>(cat.lindunn_factors.size())) {
            out.push_back({entity, "bonus must equal 0.5 x factor count"});
        }
    }
    for (const auto& t : c.threats) {
        if (valid_threat_id(t.id) && !covered.contains(t.id)) {
            out.push_back({"threat " + std::to_string(t.id), "belongs to no category"});
        }
    }

    // Glossary and guidance
    for (const auto& g : c.glossary) {
        if (g.term.empty() || g.definition.empty()) {
            out.push_back({"glossary '" + g.term + "'", "term and definition must be non-empty"});
        }
    }
    for (const auto& g : c.guidance_links) {
        if (!c.find_device(g.device_id)) {
            out.push_back({"guidance_links " + g.device_id, "references unknown device"});
        }
        for (const auto& link : g.links) {
            if (!link.url.starts_with("https://")) {
                out.push_back({"guidance_links " + g.device_id, "link '" + link.label + "' is not https"});
            }
        }
    }
    return out;
}

std::optional<EntityKind> entity_kind_from_string(std::string_view name) {
    if (name == "threat") return EntityKind::Threat;
    if (name == "device") return EntityKind::Device;
    if (name == "risk_factor" || name == "risk-factor") return EntityKind::RiskFactor;
    if (name == "category") return EntityKind::Category;
    if (name == "glossary") return EntityKind::Glossary;
    return std::nullopt;
}

std::optional<EntityRef> lookup(const Catalog& c, EntityKind kind, std::string_view id) {
    auto as_int = [&]() -> std::optional<int> {
        int value = 0;
        auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), value);
        if (ec != std::errc() || ptr != id.data() + id.size()) return std::nullopt;
        return value;
    };
    auto wrap = [](const auto* p) -> std::optional<EntityRef> {
        if (!p) return std::nullopt;
        return EntityRef(p);
    };
    switch (kind) {
        case EntityKind::Threat: {
            auto n = as_int();
            return n ? wrap(c.find_threat(*n)) : std::nullopt;
        }
        case EntityKind::Device: return wrap(c.find_device(id));
        case EntityKind::RiskFactor: return wrap(c.find_risk_factor(id));
        case EntityKind::Category: {
            auto n = as_int();
            return n ? wrap(c.find_category(*n)) : std::nullopt;
        }
        case EntityKind::Glossary: return wrap(c.find_glossary(id));
    }
    return std::nullopt;
}

const std::vector<ConformanceNote>& conformance_notes() {
    static const std::vector<ConformanceNote> notes = [] {
        auto triple = [](const json& j) {
            auto tenths = [&](const char* key) {
                return cvss::Score::from_tenths(static_cast<int>(std::lround(j.at(key).get<double>() * 10)));
            };
            return cvss::ScoreTriple{tenths("base"), tenths("temporal"), tenths("environmental")};
        };
        std::vector<ConformanceNote> out;
        const json root = json::parse(detail::embedded_conformance_notes());
        for (const json& n : root.at("notes")) {
            out.push_back({n.at("threat").get<int>(), n.at("vector").get<std::string>(),
                           triple(n.at("printed")), triple(n.at("computed")),
                           n.at("reason").get<std::string>()});
        }
        return out;
    }();
    return notes;
}

}  // namespace homethreat
