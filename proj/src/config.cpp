#include "optlab/config.hpp"

#include "optlab/methods.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace optlab {

namespace {

struct RuleName {
    LineSearchRule rule;
    std::string_view id;
};

constexpr std::array<RuleName, 11> kRuleNames{{
    {LineSearchRule::FixedStep, "FixedStep"},
    {LineSearchRule::CorrPrevIter, "CorrPrevIter"},
    {LineSearchRule::CorrPrevTwoIter, "CorrPrevTwoIter"},
    {LineSearchRule::Backtracking, "Backtracking"},
    {LineSearchRule::Armijo, "Armijo"},
    {LineSearchRule::Goldstein, "Goldstein"},
    {LineSearchRule::Wolfe, "Wolfe"},
    {LineSearchRule::StrongWolfe, "StrongWolfe"},
    {LineSearchRule::ApproxWolfe, "ApproxWolfe"},
    {LineSearchRule::MoreThuente, "MoreThuente"},
    {LineSearchRule::NonMonotone, "NonMonotone"},
}};

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void require_open(const char* field, double v, double lo, double hi) {
    if (!(v > lo && v < hi))
        throw ConfigError(field, "must lie in (" + fmt(lo) + ", " + fmt(hi) + "), got " + fmt(v));
}

}  // namespace

std::string_view to_string(LineSearchRule rule) {
    for (const auto& r : kRuleNames)
        if (r.rule == rule) return r.id;
    return "?";
}

LineSearchRule parse_line_search_rule(std::string_view id) {
    for (const auto& r : kRuleNames)
        if (r.id == id) return r.rule;
    throw Error(ErrorCode::UnknownLineSearch, "unknown line search '" + std::string(id) + "'");
}

const std::vector<LineSearchRule>& all_line_search_rules() {
    static const std::vector<LineSearchRule> rules = [] {
        std::vector<LineSearchRule> v;
        for (const auto& r : kRuleNames) v.push_back(r.rule);
        return v;
    }();
    return rules;
}

LineSearchParamUse parameters_used_by(LineSearchRule rule) {
    LineSearchParamUse u;
    switch (rule) {
        case LineSearchRule::FixedStep:
        case LineSearchRule::CorrPrevIter:
        case LineSearchRule::CorrPrevTwoIter:
            break;
        case LineSearchRule::Backtracking:
            u.rho = u.beta = true;
            break;
        case LineSearchRule::Armijo:
        case LineSearchRule::Goldstein:
            u.rho = true;
            break;
        case LineSearchRule::Wolfe:
        case LineSearchRule::StrongWolfe:
        case LineSearchRule::ApproxWolfe:
        case LineSearchRule::MoreThuente:
            u.rho = u.sigma = true;
            break;
        case LineSearchRule::NonMonotone:
            u.rho = u.beta = u.bigM = true;
            break;
    }
    return u;
}

void LineSearchConfig::validate() const {
    const LineSearchParamUse use = parameters_used_by(rule);
    if (!(tInit > 0.0) || !std::isfinite(tInit)) throw ConfigError("tInit", "must be a positive finite real");
    if (use.rho) {
        switch (rule) {
            case LineSearchRule::Goldstein: require_open("rho", rho, 0.0, 0.5); break;
            case LineSearchRule::ApproxWolfe:
                require_open("rho", rho, 0.0, 0.5);
                if (!(rho < sigma)) throw ConfigError("rho", "must be smaller than sigma");
                break;
            default: require_open("rho", rho, 0.0, 1.0); break;
        }
    }
    if (use.sigma) {
        require_open("sigma", sigma, 0.0, 1.0);
        if (!(sigma > rho)) throw ConfigError("sigma", "must be larger than rho (0 < rho < sigma < 1)");
    }
    if (use.beta) require_open("beta", beta, 0.0, 1.0);
    if (use.bigM && bigM < 1) throw ConfigError("M", "must be a positive integer");
}

LineSearchConfig default_line_search_config(LineSearchRule rule) {
    LineSearchConfig c;
    c.rule = rule;
    if (rule == LineSearchRule::Goldstein) c.rho = 0.25;
    if (rule == LineSearchRule::ApproxWolfe) c.rho = 0.1;
    return c;
}

double SolverConfig::extra(const std::string& key, double fallback) const {
    auto it = extras.find(key);
    return it == extras.end() ? fallback : it->second;
}

DefaultPairing default_pairing(std::string_view name) {
    const MethodInfo& info = method_info(name);
    auto ls = [](LineSearchRule r, double rho, double sigma) {
        LineSearchConfig c = default_line_search_config(r);
        c.rho = rho;
        c.sigma = sigma;
        return c;
    };
    DefaultPairing p;
    if (name == "CG_DESCENT") {
        p.lineSearch = ls(LineSearchRule::ApproxWolfe, 0.1, 0.9);
    } else if (name == "L-BFGS") {
        p.lineSearch = ls(LineSearchRule::MoreThuente, 1e-4, 0.9);
        p.extras["lbfgsMemory"] = 10;
    } else if (name == "BarzilaiBorwein" || name == "ScalarCorrection") {
        LineSearchConfig c = default_line_search_config(LineSearchRule::NonMonotone);
        c.rho = 1e-4;
        c.beta = 0.5;
        c.bigM = 10;
        c.tInit = 1.0;
        p.lineSearch = c;
    } else if (name == "Newton") {
        p.lineSearch = default_line_search_config(LineSearchRule::FixedStep);
    } else if (name == "GradientDescent") {
        LineSearchConfig c = default_line_search_config(LineSearchRule::Backtracking);
        c.rho = 1e-4;
        c.beta = 0.5;
        p.lineSearch = c;
    } else if (info.group == "Conjugate Gradient") {
        p.lineSearch = ls(LineSearchRule::StrongWolfe, 1e-4, 0.1);
    } else if (info.group == "Modified Newton") {
        p.lineSearch = ls(LineSearchRule::Wolfe, 1e-4, 0.9);
        if (name == "GoldsteinPrice") {
            p.extras["eta"] = 0.2;
        } else {
            p.extras["lambda0"] = 1e-3;
            p.extras["nu"] = 10;
        }
    } else if (info.group == "Quasi Newton") {
        p.lineSearch = ls(LineSearchRule::StrongWolfe, 1e-4, 0.9);
    } else if (info.group == "Trust Region") {
        p.extras["trustRadius0"] = 1.0;
        p.extras["trustRadiusMax"] = 100.0;
        p.extras["eta"] = 1e-3;
    }
    return p;
}

namespace {

void validate_extras(const MethodInfo& info, const std::map<std::string, double>& extras) {
    for (const auto& [key, value] : extras) {
        if (std::find(info.extras.begin(), info.extras.end(), key) == info.extras.end())
            throw ConfigError(key, "not a parameter of " + info.name);
        if (!std::isfinite(value)) throw ConfigError(key, "must be finite");
    }
    auto get = [&](const char* k) { return extras.at(k); };
    if (extras.count("lbfgsMemory")) {
        const double m = get("lbfgsMemory");
        if (m < 1 || m != std::floor(m)) throw ConfigError("lbfgsMemory", "must be a positive integer");
    }
    if (extras.count("lambda0") && !(get("lambda0") > 0)) throw ConfigError("lambda0", "must be positive");
    if (extras.count("nu") && !(get("nu") > 1)) throw ConfigError("nu", "must be greater than 1");
    if (info.group == "Modified Newton" && extras.count("eta")) require_open("eta", get("eta"), 0.0, 1.0);
    if (info.group == "Trust Region") {
        if (extras.count("trustRadius0") && !(get("trustRadius0") > 0))
            throw ConfigError("trustRadius0", "must be positive");
        if (extras.count("trustRadiusMax") && extras.count("trustRadius0") &&
            !(get("trustRadiusMax") >= get("trustRadius0")))
            throw ConfigError("trustRadiusMax", "must be at least trustRadius0");
        if (extras.count("eta") && !(get("eta") >= 0 && get("eta") < 0.25))
            throw ConfigError("eta", "must lie in [0, 0.25)");
    }
}

}  // namespace

SolverConfig resolve_config(const SolverConfig& config) {
    const MethodInfo& info = method_info(config.methodName);
    if (!config.methodGroup.empty() && config.methodGroup != info.group)
        throw ConfigError("methodGroup", "method " + info.name + " belongs to group '" + info.group + "'");
    config.stopping.validate();

    SolverConfig out = config;
    out.methodGroup = info.group;
    const DefaultPairing pairing = default_pairing(info.name);

    if (config.defaultMode) {
        out.lineSearch = pairing.lineSearch;
        for (const auto& [k, v] : pairing.extras) out.extras[k] = v;
    } else {
        if (info.usesLineSearch && !config.lineSearch)
            throw ConfigError("lineSearch", "required when default mode is off");
        if (!info.usesLineSearch && config.lineSearch)
            throw ConfigError("lineSearch", info.name + " does not use a line search");
        for (const auto& [k, v] : pairing.extras) out.extras.try_emplace(k, v);
    }
    if (out.lineSearch) out.lineSearch->validate();
    validate_extras(info, out.extras);
    return out;
}

}  // namespace optlab
