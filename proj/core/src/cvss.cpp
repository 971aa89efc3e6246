#include "homethreat/cvss.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>

namespace homethreat::cvss {

namespace {

struct MetricInfo {
    std::string_view key;
    std::string_view domain;
};

constexpr std::array<MetricInfo, kMetricCount> kMetrics{{
    {"AV", "NALP"}, {"AC", "LH"}, {"PR", "NLH"}, {"UI", "NR"},
    {"S", "UC"}, {"C", "NLH"}, {"I", "NLH"}, {"A", "NLH"},
    {"E", "XUPFH"}, {"RL", "XOTWU"}, {"RC", "XURC"},
    {"CR", "XLMH"}, {"IR", "XLMH"}, {"AR", "XLMH"},
    {"MAV", "XNALP"}, {"MAC", "XLH"}, {"MPR", "XNLH"}, {"MUI", "XNR"},
    {"MS", "XUC"}, {"MC", "XNLH"}, {"MI", "XNLH"}, {"MA", "XNLH"},
}};

constexpr std::size_t idx(Metric m) { return static_cast<std::size_t>(m); }

double attack_vector(char v) {
    switch (v) {
        case 'N': return 0.85;
        case 'A': return 0.62;
        case 'L': return 0.55;
        default: return 0.2;  // P
    }
}

double attack_complexity(char v) { return v == 'L' ? 0.77 : 0.44; }

double privileges_required(char v, bool scope_changed) {
    switch (v) {
        case 'N': return 0.85;
        case 'L': return scope_changed ? 0.68 : 0.62;
        default: return scope_changed ? 0.5 : 0.27;  // H
    }
}

double user_interaction(char v) { return v == 'N' ? 0.85 : 0.62; }

double cia_impact(char v) {
    switch (v) {
        case 'H': return 0.56;
        case 'L': return 0.22;
        default: return 0.0;
    }
}

double exploit_maturity(char v) {
    switch (v) {
        case 'U': return 0.91;
        case 'P': return 0.94;
        case 'F': return 0.97;
        default: return 1.0;  // H, X
    }
}

double remediation_level(char v) {
    switch (v) {
        case 'O': return 0.95;
        case 'T': return 0.96;
        case 'W': return 0.97;
        default: return 1.0;  // U, X
    }
}

double report_confidence(char v) {
    switch (v) {
        case 'U': return 0.92;
        case 'R': return 0.96;
        default: return 1.0;  // C, X
    }
}

double requirement(char v) {
    switch (v) {
        case 'L': return 0.5;
        case 'H': return 1.5;
        default: return 1.0;  // M, X
    }
}

}  // namespace

std::string_view metric_key(Metric m) { return kMetrics[idx(m)].key; }

std::string_view metric_domain(Metric m) { return kMetrics[idx(m)].domain; }

std::optional<Metric> metric_from_key(std::string_view key) {
    for (std::size_t i = 0; i < kMetricCount; ++i) {
        if (kMetrics[i].key == key) return static_cast<Metric>(i);
    }
    return std::nullopt;
}

CvssVector::CvssVector() {
    values_.fill('X');
    values_[index(Metric::AV)] = 'P';
    values_[index(Metric::AC)] = 'H';
    values_[index(Metric::PR)] = 'H';
    values_[index(Metric::UI)] = 'R';
    values_[index(Metric::S)] = 'U';
    values_[index(Metric::C)] = 'N';
    values_[index(Metric::I)] = 'N';
    values_[index(Metric::A)] = 'N';
}

void CvssVector::set(Metric m, char value) {
    if (metric_domain(m).find(value) == std::string_view::npos) {
        throw std::invalid_argument(std::string("illegal value '") + value + "' for metric " +
                                    std::string(metric_key(m)));
    }
    values_[index(m)] = value;
}

std::string_view to_string(ParseErrc e) {
    switch (e) {
        case ParseErrc::MissingPrefix: return "MissingPrefix";
        case ParseErrc::UnknownMetric: return "UnknownMetric";
        case ParseErrc::IllegalValue: return "IllegalValue";
        case ParseErrc::DuplicateMetric: return "DuplicateMetric";
        case ParseErrc::MissingBaseMetric: return "MissingBaseMetric";
        case ParseErrc::Malformed: return "Malformed";
    }
    return "Unknown";
}

ParseError::ParseError(ParseErrc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

CvssVector parse_vector(std::string_view text) {
    if (!text.starts_with(kPrefix)) {
        throw ParseError(ParseErrc::MissingPrefix, "vector must start with 'CVSS:3.1/'");
    }
    std::string_view rest = text.substr(kPrefix.size());

    CvssVector v;
    std::bitset<kMetricCount> seen;
    while (true) {
        const auto slash = rest.find('/');
        const std::string_view segment = rest.substr(0, slash);
        const auto colon = segment.find(':');
        if (segment.empty() || colon == std::string_view::npos || colon == 0) {
            throw ParseError(ParseErrc::Malformed, "bad segment '" + std::string(segment) + "'");
        }
        const std::string_view key = segment.substr(0, colon);
        const std::string_view value = segment.substr(colon + 1);

        const auto metric = metric_from_key(key);
        if (!metric) {
            throw ParseError(ParseErrc::UnknownMetric, "unknown metric '" + std::string(key) + "'");
        }
        if (seen.test(idx(*metric))) {
            throw ParseError(ParseErrc::DuplicateMetric, "metric " + std::string(key) + " repeated");
        }
        if (value.size() != 1 || metric_domain(*metric).find(value[0]) == std::string_view::npos) {
            throw ParseError(ParseErrc::IllegalValue,
                             "illegal value '" + std::string(value) + "' for " + std::string(key));
        }
        seen.set(idx(*metric));
        v.set(*metric, value[0]);

        if (slash == std::string_view::npos) break;
        rest = rest.substr(slash + 1);
    }

    for (std::size_t i = 0; i < kBaseMetricCount; ++i) {
        if (!seen.test(i)) {
            throw ParseError(ParseErrc::MissingBaseMetric,
                             "base metric " + std::string(kMetrics[i].key) + " absent");
        }
    }
    return v;
}

std::string canonical_string(const CvssVector& v) {
    std::string out(kPrefix);
    for (std::size_t i = 0; i < kMetricCount; ++i) {
        const auto m = static_cast<Metric>(i);
        const char value = v.get(m);
        if (!is_base(m) && value == 'X') continue;
        if (out.size() > kPrefix.size()) out += '/';
        out += kMetrics[i].key;
        out += ':';
        out += value;
    }
    return out;
}

std::string Score::str() const {
    std::string out = std::to_string(tenths_ / 10);
    out += '.';
    out += static_cast<char>('0' + tenths_ % 10);
    return out;
}

std::string_view to_string(Severity s) {
    switch (s) {
        case Severity::None: return "None";
        case Severity::Low: return "Low";
        case Severity::Medium: return "Medium";
        case Severity::High: return "High";
        case Severity::Critical: return "Critical";
    }
    return "None";
}

char severity_letter(Severity s) {
    switch (s) {
        case Severity::None: return 'N';
        case Severity::Low: return 'L';
        case Severity::Medium: return 'M';
        case Severity::High: return 'H';
        case Severity::Critical: return 'C';
    }
    return 'N';
}

Severity severity(Score s) {
    const int t = s.tenths();
    if (t <= 0) return Severity::None;
    if (t < 40) return Severity::Low;
    if (t < 70) return Severity::Medium;
    if (t < 90) return Severity::High;
    return Severity::Critical;
}

Score round_up(double x) {
    const auto scaled = static_cast<long long>(std::llround(x * 100000.0));
    const long long whole = scaled / 10000;
    return Score::from_tenths(static_cast<int>(scaled % 10000 == 0 ? whole : whole + 1));
}

ScoreTriple score(const CvssVector& v) {
    using M = Metric;
    auto modified = [&](M mod, M base) {
        const char value = v.get(mod);
        return value == 'X' ? v.get(base) : value;
    };

    const double temporal_factor = exploit_maturity(v.get(M::E)) *
                                   remediation_level(v.get(M::RL)) *
                                   report_confidence(v.get(M::RC));

    // Base
    const bool changed = v.get(M::S) == 'C';
    const double iss = 1.0 - (1.0 - cia_impact(v.get(M::C))) *
                                 (1.0 - cia_impact(v.get(M::I))) *
                                 (1.0 - cia_impact(v.get(M::A)));
    const double impact = changed ? 7.52 * (iss - 0.029) - 3.25 * std::pow(iss - 0.02, 15)
                                  : 6.42 * iss;
    const double exploitability = 8.22 * attack_vector(v.get(M::AV)) *
                                  attack_complexity(v.get(M::AC)) *
                                  privileges_required(v.get(M::PR), changed) *
                                  user_interaction(v.get(M::UI));
    Score base;
    if (impact > 0) {
        base = changed ? round_up(std::min(1.08 * (impact + exploitability), 10.0))
                       : round_up(std::min(impact + exploitability, 10.0));
    }

    const Score temporal = round_up(base.value() * temporal_factor);

    // Environmental
    const bool m_changed = modified(M::MS, M::S) == 'C';
    const double miss = std::min(
        1.0 - (1.0 - requirement(v.get(M::CR)) * cia_impact(modified(M::MC, M::C))) *
                  (1.0 - requirement(v.get(M::IR)) * cia_impact(modified(M::MI, M::I))) *
                  (1.0 - requirement(v.get(M::AR)) * cia_impact(modified(M::MA, M::A))),
        0.915);
    const double m_impact = m_changed
                                ? 7.52 * (miss - 0.029) - 3.25 * std::pow(miss * 0.9731 - 0.02, 13)
                                : 6.42 * miss;
    const double m_exploitability = 8.22 * attack_vector(modified(M::MAV, M::AV)) *
                                    attack_complexity(modified(M::MAC, M::AC)) *
                                    privileges_required(modified(M::MPR, M::PR), m_changed) *
                                    user_interaction(modified(M::MUI, M::UI));
    Score environmental;
    if (m_impact > 0) {
        const Score adjusted = m_changed
                                   ? round_up(std::min(1.08 * (m_impact + m_exploitability), 10.0))
                                   : round_up(std::min(m_impact + m_exploitability, 10.0));
        environmental = round_up(adjusted.value() * temporal_factor);
    }

    return {base, temporal, environmental};
}

}  // namespace homethreat::cvss
