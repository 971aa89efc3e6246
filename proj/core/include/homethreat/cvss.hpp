#pragma once

// CVSS v3.1 vector parsing, canonical serialization and scoring.
//
// All functions are pure; CvssVector and ScoreTriple are plain values.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace homethreat::cvss {

inline constexpr std::string_view kPrefix = "CVSS:3.1/";

/// Metrics in canonical (specification) order: base, temporal, environmental.
enum class Metric : std::uint8_t {
    AV, AC, PR, UI, S, C, I, A,
    E, RL, RC,
    CR, IR, AR, MAV, MAC, MPR, MUI, MS, MC, MI, MA,
};

inline constexpr std::size_t kMetricCount = 22;
inline constexpr std::size_t kBaseMetricCount = 8;

/// Abbreviated key as written in vector strings, e.g. "MAV".
std::string_view metric_key(Metric m);

/// Legal value letters for a metric. Optional metrics include 'X'.
std::string_view metric_domain(Metric m);

std::optional<Metric> metric_from_key(std::string_view key);

constexpr bool is_base(Metric m) { return static_cast<std::size_t>(m) < kBaseMetricCount; }

/// Parsed metric assignment. Unset optional metrics hold 'X' (Not Defined).
class CvssVector {
public:
    /// All base metrics at their lowest-impact value and everything optional at X.
    CvssVector();

    char get(Metric m) const { return values_[index(m)]; }

    /// Throws std::invalid_argument if the value is outside the metric's domain.
    void set(Metric m, char value);

    bool operator==(const CvssVector&) const = default;

private:
    static constexpr std::size_t index(Metric m) { return static_cast<std::size_t>(m); }
    std::array<char, kMetricCount> values_;
};

enum class ParseErrc {
    MissingPrefix,
    UnknownMetric,
    IllegalValue,
    DuplicateMetric,
    MissingBaseMetric,
    Malformed,
};

std::string_view to_string(ParseErrc e);

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrc code, const std::string& detail);
    ParseErrc code() const noexcept { return code_; }

private:
    ParseErrc code_;
};

/// Strict parser. Segments may appear in any order; keys and values are
/// case-sensitive. An explicit ":X" on an optional metric is accepted.
CvssVector parse_vector(std::string_view text);

/// "CVSS:3.1/" followed by the base metrics and any non-X optional metrics,
/// all in specification order.
std::string canonical_string(const CvssVector& v);

/// A CVSS score held as an integer number of tenths (0..100).
class Score {
public:
    constexpr Score() = default;
    static constexpr Score from_tenths(int tenths) { return Score(tenths); }

    constexpr int tenths() const { return tenths_; }
    constexpr double value() const { return tenths_ / 10.0; }

    /// "4.3"
    std::string str() const;

    auto operator<=>(const Score&) const = default;

private:
    constexpr explicit Score(int tenths) : tenths_(tenths) {}
    int tenths_ = 0;
};

enum class Severity { None, Low, Medium, High, Critical };

std::string_view to_string(Severity s);
/// Single-letter annotation: N, L, M, H, C.
char severity_letter(Severity s);

Severity severity(Score s);

struct ScoreTriple {
    Score base;
    Score temporal;
    Score environmental;

    bool operator==(const ScoreTriple&) const = default;
};

/// FIRST v3.1 Roundup: smallest one-decimal value >= x, computed on
/// round(x * 100000) so binary drift never bumps an exact tenth.
Score round_up(double x);

ScoreTriple score(const CvssVector& v);

}  // namespace homethreat::cvss
