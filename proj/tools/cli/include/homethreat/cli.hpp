#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace homethreat::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kCatalogError = 2,
    kEvaluationError = 3,
};

struct Environment {
    bool stdout_is_tty = false;
    bool no_color = false;  ///< NO_COLOR present
    /// Source of report timestamps; defaults to the system clock.
    std::function<std::string()> clock;
};

/// Reads isatty(stdout) and NO_COLOR.
Environment detect_environment();

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        const Environment& env = {});

}  // namespace homethreat::cli
