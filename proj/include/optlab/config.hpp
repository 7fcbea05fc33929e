#pragma once

#include "optlab/core.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace optlab {

enum class LineSearchRule {
    FixedStep,
    CorrPrevIter,
    CorrPrevTwoIter,
    Backtracking,
    Armijo,
    Goldstein,
    Wolfe,
    StrongWolfe,
    ApproxWolfe,
    MoreThuente,
    NonMonotone,
};

std::string_view to_string(LineSearchRule rule);
/// Throws Error(UnknownLineSearch).
LineSearchRule parse_line_search_rule(std::string_view id);
const std::vector<LineSearchRule>& all_line_search_rules();

/// Parameter names exactly as the GUI labels them.
struct LineSearchParamUse {
    bool rho = false;
    bool sigma = false;
    bool beta = false;
    bool tInit = true;
    bool bigM = false;
};
LineSearchParamUse parameters_used_by(LineSearchRule rule);

struct LineSearchConfig {
    LineSearchRule rule = LineSearchRule::StrongWolfe;
    double rho = 1e-4;
    double sigma = 0.9;
    double beta = 0.5;
    double tInit = 1.0;
    long bigM = 10;

    /// Enforces the bounds of the parameters the rule consumes. Throws ConfigError.
    void validate() const;

    friend bool operator==(const LineSearchConfig&, const LineSearchConfig&) = default;
};

/// Generic defaults for a rule when the user picks it manually.
LineSearchConfig default_line_search_config(LineSearchRule rule);

struct SolverConfig {
    std::string methodGroup;  // optional; checked against the registry when non-empty
    std::string methodName;
    std::optional<LineSearchConfig> lineSearch;  // absent for trust-region methods
    StoppingCriteria stopping;
    bool defaultMode = true;
    std::map<std::string, double> extras;

    /// Value of an extra, or `fallback` when not set.
    double extra(const std::string& key, double fallback) const;
};

/// Row of the default-mode table.
struct DefaultPairing {
    std::optional<LineSearchConfig> lineSearch;
    std::map<std::string, double> extras;
};

/// Throws Error(UnknownMethod).
DefaultPairing default_pairing(std::string_view method_name);

/// Applies default mode (if set) and validates the result against the method
/// registry. The returned config is what actually runs.
SolverConfig resolve_config(const SolverConfig& config);

}  // namespace optlab
