#include "optlab/json_io.hpp"

#include "optlab/methods.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace optlab {

namespace {

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

double number(const Json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "must be a number");
    return j.get<double>();
}

long integer(const Json& j, const std::string& field) {
    if (j.is_number_integer()) return j.get<long>();
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<long>(v);
    }
    throw ConfigError(field, "must be an integer");
}

std::string text(const Json& j, const std::string& field) {
    if (!j.is_string()) throw ConfigError(field, "must be a string");
    return j.get<std::string>();
}

bool boolean(const Json& j, const std::string& field) {
    if (!j.is_boolean()) throw ConfigError(field, "must be true or false");
    return j.get<bool>();
}

void require_object(const Json& j, const std::string& field) {
    if (!j.is_object()) throw ConfigError(field.empty() ? "body" : field, "must be an object");
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& prefix) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError(join(prefix, it.key()), "unknown field");
    }
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const Vector& v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(finite_or_null(v[i]));
    return a;
}

Vector vector_from_json(const Json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError(field, "must be an array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Index>(i)] = number(j[i], field + "[" + std::to_string(i) + "]");
        if (!std::isfinite(v[static_cast<Index>(i)])) throw ConfigError(field, "entries must be finite");
    }
    return v;
}

Json to_json(const StoppingCriteria& s) {
    return {{"maxIter", s.maxIterNum}, {"epsilon", s.epsilon}, {"workPrec", s.workPrec}};
}

StoppingCriteria stopping_from_json(const Json& j, StoppingCriteria base) {
    require_object(j, "stopping");
    reject_unknown(j, {"maxIter", "epsilon", "workPrec"}, "stopping");
    if (j.contains("maxIter")) base.maxIterNum = integer(j["maxIter"], "maxIter");
    if (j.contains("epsilon")) base.epsilon = number(j["epsilon"], "epsilon");
    if (j.contains("workPrec")) base.workPrec = number(j["workPrec"], "workPrec");
    base.validate();
    return base;
}

Json to_json(const LineSearchConfig& c) {
    const LineSearchParamUse use = parameters_used_by(c.rule);
    Json j = {{"rule", std::string(to_string(c.rule))}, {"tInit", c.tInit}};
    if (use.rho) j["rho"] = c.rho;
    if (use.sigma) j["sigma"] = c.sigma;
    if (use.beta) j["beta"] = c.beta;
    if (use.bigM) j["M"] = c.bigM;
    return j;
}

LineSearchConfig line_search_from_json(const Json& j) {
    require_object(j, "lineSearch");
    reject_unknown(j, {"rule", "rho", "sigma", "beta", "tInit", "M"}, "lineSearch");
    if (!j.contains("rule")) throw ConfigError("rule", "line-search rule is required");
    LineSearchRule rule;
    try {
        rule = parse_line_search_rule(text(j["rule"], "rule"));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("rule", e.what());
    }
    LineSearchConfig c = default_line_search_config(rule);
    if (j.contains("rho")) c.rho = number(j["rho"], "rho");
    if (j.contains("sigma")) c.sigma = number(j["sigma"], "sigma");
    if (j.contains("beta")) c.beta = number(j["beta"], "beta");
    if (j.contains("tInit")) c.tInit = number(j["tInit"], "tInit");
    if (j.contains("M")) c.bigM = integer(j["M"], "M");
    c.validate();
    return c;
}

Json to_json(const SolverConfig& c) {
    Json j = {{"methodGroup", c.methodGroup},
              {"methodName", c.methodName},
              {"defaultMode", c.defaultMode},
              {"lineSearch", c.lineSearch ? to_json(*c.lineSearch) : Json(nullptr)},
              {"stopping", to_json(c.stopping)},
              {"extras", Json::object()}};
    for (const auto& [k, v] : c.extras) j["extras"][k] = v;
    return j;
}

SolverConfig solver_config_from_json(const Json& j) {
    require_object(j, "");
    SolverConfig c;
    if (!j.contains("methodName")) throw ConfigError("methodName", "is required");
    c.methodName = text(j["methodName"], "methodName");
    if (j.contains("methodGroup") && !j["methodGroup"].is_null()) c.methodGroup = text(j["methodGroup"], "methodGroup");
    const bool hasLineSearch = j.contains("lineSearch") && !j["lineSearch"].is_null();
    c.defaultMode = !hasLineSearch;
    if (j.contains("defaultMode")) c.defaultMode = boolean(j["defaultMode"], "defaultMode");
    // Client line-search fields are ignored in default mode.
    if (!c.defaultMode && hasLineSearch)
        c.lineSearch = line_search_from_json(j["lineSearch"]);
    if (j.contains("stopping")) c.stopping = stopping_from_json(j["stopping"]);
    if (j.contains("extras")) {
        require_object(j["extras"], "extras");
        for (auto it = j["extras"].begin(); it != j["extras"].end(); ++it)
            c.extras[it.key()] = number(it.value(), it.key());
    }
    return c;
}

Json to_json(const EvalCounters& c) {
    return {{"nValue", c.nValue}, {"nGradient", c.nGradient}, {"nHessian", c.nHessian}};
}

Json to_json(const SolveReport& r, bool withTrace) {
    Json j = {{"fmin", finite_or_null(r.fmin)},
              {"xmin", to_json(r.xmin)},
              {"gradientNorm", finite_or_null(r.final_gradient_norm())},
              {"iterations", r.iterations},
              {"cpuSeconds", r.cpuSeconds},
              {"counters", to_json(r.counters)},
              {"terminationReason", std::string(to_string(r.terminationReason))},
              {"converged", r.converged()},
              {"message", r.message}};
    if (withTrace) {
        Json fv = Json::array(), gn = Json::array();
        for (double v : r.trace.functionValue) fv.push_back(finite_or_null(v));
        for (double v : r.trace.gradientNorm) gn.push_back(finite_or_null(v));
        j["trace"] = {{"functionValue", fv}, {"gradientNorm", gn}};
    }
    return j;
}

Json to_json(const RunRecord& r) {
    return {{"solver", r.solver},
            {"problem", r.problem},
            {"n", r.n},
            {"iterations", r.iterations},
            {"cpuSeconds", r.cpuSeconds},
            {"counters", to_json(r.counters)},
            {"solved", r.solved},
            {"reason", std::string(to_string(r.reason))}};
}

Json to_json(const std::vector<RunRecord>& records) {
    Json a = Json::array();
    for (const auto& r : records) a.push_back(to_json(r));
    return a;
}

Json to_json(const ProfileTable& t) {
    Json ratio = Json::array();
    for (const auto& row : t.ratio) {
        Json jr = Json::array();
        for (double v : row) jr.push_back(finite_or_null(v));
        ratio.push_back(jr);
    }
    Json curves = Json::object();
    for (std::size_t s = 0; s < t.solvers.size(); ++s) curves[t.solvers[s]] = t.rho[s];
    return {{"measure", std::string(to_string(t.kind))},
            {"solvers", t.solvers},
            {"problems", t.problems},
            {"ratio", ratio},
            {"tau", t.tau},
            {"rho", curves},
            {"substitutedZero", t.substitutedZero}};
}

Json to_json(const FunctionSpec& spec) {
    Json j = {{"name", spec.name},
              {"minDimension", spec.minDimension},
              {"dimensionConstraint", spec.dimension_constraint()},
              {"defaultDimension", default_dimension(spec, false)},
              {"defaultDimensionSecondOrder", default_dimension(spec, true)},
              {"supports", {{"value", true}, {"gradient", spec.supports.gradient}, {"hessian", spec.supports.hessian}}},
              {"hessianStructure", std::string(to_string(spec.structure))},
              {"startingPointRule", spec.startingPoint.id},
              {"formula", spec.formula}};
    j["knownMinimum"] = spec.knownMinimum ? Json(*spec.knownMinimum) : Json(nullptr);
    return j;
}

Json functions_json() {
    Json a = Json::array();
    for (const auto& s : catalog()) a.push_back(to_json(s));
    return a;
}

Json methods_json() {
    Json groups = Json::object();
    for (const auto& g : method_groups()) groups[g] = Json::array();
    for (const auto& m : method_registry()) {
        groups[m.group].push_back({{"name", m.name},
                                   {"usesLineSearch", m.usesLineSearch},
                                   {"derivativeOrder", m.derivativeOrder},
                                   {"extras", m.extras},
                                   {"summary", m.summary}});
    }
    return {{"groups", groups}};
}

Json line_searches_json() {
    Json a = Json::array();
    for (LineSearchRule r : all_line_search_rules()) {
        const LineSearchParamUse u = parameters_used_by(r);
        Json params = Json::array();
        if (u.rho) params.push_back("rho");
        if (u.sigma) params.push_back("sigma");
        if (u.beta) params.push_back("beta");
        if (u.tInit) params.push_back("tInit");
        if (u.bigM) params.push_back("M");
        a.push_back({{"id", std::string(to_string(r))},
                     {"parameters", params},
                     {"defaults", to_json(default_line_search_config(r))}});
    }
    return a;
}

Json defaults_json(const std::string& method) {
    const MethodInfo& info = method_info(method);
    const DefaultPairing p = default_pairing(method);
    SolverConfig c;
    c.methodGroup = info.group;
    c.methodName = info.name;
    c.defaultMode = true;
    c.lineSearch = p.lineSearch;
    c.extras = p.extras;
    Json j = to_json(c);
    j["usesLineSearch"] = info.usesLineSearch;
    return j;
}

BenchConfig bench_config_from_json(const Json& j) {
    require_object(j, "");
    reject_unknown(j, {"solvers", "problems", "stopping"}, "");
    BenchConfig b;
    if (!j.contains("solvers") || !j["solvers"].is_array()) throw ConfigError("solvers", "must be an array");
    if (!j.contains("problems") || !j["problems"].is_array()) throw ConfigError("problems", "must be an array");
    for (const auto& s : j["solvers"]) {
        SolverSpec spec;
        if (s.is_string()) {
            spec.id = s.get<std::string>();
            spec.config.methodName = spec.id;
        } else {
            require_object(s, "solvers");
            Json body = s;
            if (body.contains("id")) {
                spec.id = text(body["id"], "solvers.id");
                body.erase("id");
            }
            spec.config = solver_config_from_json(body);
            if (spec.id.empty()) spec.id = spec.config.methodName;
        }
        b.solvers.push_back(std::move(spec));
    }
    for (const auto& p : j["problems"]) {
        require_object(p, "problems");
        reject_unknown(p, {"function", "n", "x0"}, "problems");
        ProblemSpec spec;
        if (!p.contains("function")) throw ConfigError("problems.function", "is required");
        spec.function = text(p["function"], "problems.function");
        if (!p.contains("n")) throw ConfigError("problems.n", "is required");
        spec.n = integer(p["n"], "problems.n");
        if (p.contains("x0")) spec.x0 = vector_from_json(p["x0"], "problems.x0");
        b.problems.push_back(std::move(spec));
    }
    if (j.contains("stopping")) b.stopping = stopping_from_json(j["stopping"]);
    return b;
}

BenchConfig parse_bench_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    return bench_config_from_json(j);
}

BenchConfig load_bench_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_bench_config(ss.str());
}

}  // namespace optlab
