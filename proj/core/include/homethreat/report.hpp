#pragma once

// Human and machine renderings of a Report.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "homethreat/catalog.hpp"
#include "homethreat/engine.hpp"

namespace homethreat {

inline constexpr int kReportSchemaVersion = 1;

enum class ReportFormat { Text, Markdown, Machine };

std::optional<ReportFormat> report_format_from_string(std::string_view name);
std::string_view to_string(ReportFormat f);

class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RenderedReport {
    ReportFormat format = ReportFormat::Text;
    std::string body;
    std::vector<std::string> warnings;
};

struct RenderOptions {
    /// ANSI colour for severity labels; text format only.
    bool color = false;
};

RenderedReport render(const Report& report, ReportFormat format, const RenderOptions& options = {});
/// Throws ReportError for an unknown format name.
RenderedReport render(const Report& report, std::string_view format, const RenderOptions& options = {});

/// Inverse of the machine format. Threat records are taken from the
/// document itself, so no catalog is needed.
Report parse_machine_report(std::string_view document);

/// Curated links for the selected devices, in catalog device order.
std::vector<GuidanceEntry> guidance_links(const std::vector<std::string>& devices,
                                           const Catalog& catalog);

/// Two decimals, ties to even.
std::string format_score(double value);

}  // namespace homethreat
