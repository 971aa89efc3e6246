#pragma once

// Fixed reference data the catalog document is checked against: the device
// category key, the per-category threat sets and privacy-factor counts, the
// risk-factor weights and threat relations, and the threat naming.

#include <array>
#include <span>
#include <string_view>

namespace homethreat::reference {

struct ThreatRef {
    int id;
    char stride;
    std::string_view short_name;
};

struct DeviceRef {
    std::string_view id;
    std::span<const int> categories;
};

struct CategoryRef {
    int id;
    std::span<const int> threats;
    int factor_count;
};

struct RiskFactorRef {
    std::string_view id;
    int weight;
    std::span<const int> related;
    std::span<const int> off_reductions;
};

std::span<const ThreatRef> threats();
std::span<const DeviceRef> devices();
std::span<const CategoryRef> categories();
std::span<const RiskFactorRef> risk_factors();

}  // namespace homethreat::reference
