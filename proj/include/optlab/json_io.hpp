#pragma once

#include "optlab/bench.hpp"
#include "optlab/config.hpp"
#include "optlab/core.hpp"
#include "optlab/functions.hpp"

#include <json.hpp>

#include <string>

namespace optlab {

using Json = nlohmann::json;

// Readers throw ConfigError naming the offending key (dotted for nested keys).

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& field);

Json to_json(const StoppingCriteria& s);
/// Starts from `base` and overrides the keys present (maxIter, epsilon, workPrec).
StoppingCriteria stopping_from_json(const Json& j, StoppingCriteria base = {});

Json to_json(const LineSearchConfig& c);
/// `rule` is required; missing parameters take the rule's generic defaults.
LineSearchConfig line_search_from_json(const Json& j);

Json to_json(const SolverConfig& c);
/// Keys: methodGroup, methodName, defaultMode, lineSearch, stopping, extras.
SolverConfig solver_config_from_json(const Json& j);

/// Every SolveReport field, with the full trace unless `withTrace` is false.
Json to_json(const SolveReport& r, bool withTrace = true);

Json to_json(const EvalCounters& c);
Json to_json(const RunRecord& r);
Json to_json(const std::vector<RunRecord>& records);
Json to_json(const ProfileTable& t);
Json to_json(const FunctionSpec& spec);

Json functions_json();
Json methods_json();
Json line_searches_json();
/// Default pairing plus stopping defaults for one method.
Json defaults_json(const std::string& method);

struct BenchConfig {
    std::vector<SolverSpec> solvers;
    std::vector<ProblemSpec> problems;
    StoppingCriteria stopping;
};

/// {"solvers": ["BFGS", {"id": ..., "methodName": ..., ...}],
///  "problems": [{"function": ..., "n": ...}], "stopping": {...}}
BenchConfig bench_config_from_json(const Json& j);
BenchConfig parse_bench_config(const std::string& text);
BenchConfig load_bench_config(const std::string& path);

}  // namespace optlab
