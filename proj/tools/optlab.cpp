// optlab: solve, bench, list, defaults.

#include "optlab/bench.hpp"
#include "optlab/functions.hpp"
#include "optlab/json_io.hpp"
#include "optlab/methods.hpp"
#include "optlab/solvers.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace optlab;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBudget = 2;
constexpr int kExitFailure = 3;

struct SolveFlags {
    std::string function, method, group;
    std::optional<long> n;
    std::optional<std::string> x0;
    std::optional<std::string> lineSearch;
    std::optional<double> rho, sigma, beta, tInit;
    std::optional<long> bigM;
    std::optional<long> maxIter;
    std::optional<double> epsilon, workPrec;
    std::vector<std::string> extras;
    bool defaultMode = false;
    std::string output = "text";
    std::optional<std::string> trace;
};

Vector parse_x0(const std::string& s) {
    std::vector<double> vals;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            vals.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw ConfigError("x0", "'" + item + "' is not a number");
        }
    }
    if (vals.empty()) throw ConfigError("x0", "empty coordinate list");
    return Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string describe(const LineSearchConfig& c) {
    const LineSearchParamUse u = parameters_used_by(c.rule);
    std::string s(to_string(c.rule));
    if (u.rho) s += " rho=" + fmt(c.rho);
    if (u.sigma) s += " sigma=" + fmt(c.sigma);
    if (u.beta) s += " beta=" + fmt(c.beta);
    if (u.tInit) s += " tInit=" + fmt(c.tInit);
    if (u.bigM) s += " M=" + std::to_string(c.bigM);
    return s;
}

// Config field names as the corresponding command-line flag.
std::string flag_for(const std::string& field) {
    static const std::map<std::string, std::string> flags = {
        {"rho", "--rho"},           {"sigma", "--sigma"},       {"beta", "--beta"},
        {"tInit", "--t-init"},      {"M", "--big-m"},           {"maxIter", "--max-iter"},
        {"epsilon", "--epsilon"},   {"workPrec", "--work-prec"}, {"x0", "--x0"},
        {"n", "--n"},               {"default-mode", "--default-mode"}, {"line-search", "--line-search"},
        {"methodGroup", "--group"}, {"lineSearch", "--line-search"},
    };
    const auto it = flags.find(field);
    return it == flags.end() ? field : it->second;
}

int exit_code(TerminationReason r) {
    switch (r) {
        case TerminationReason::GradientTolerance:
        case TerminationReason::WorkPrecision: return kExitConverged;
        case TerminationReason::MaxIterations: return kExitBudget;
        default: return kExitFailure;
    }
}

SolverConfig build_config(const SolveFlags& fl) {
    const bool lsFlags = fl.lineSearch || fl.rho || fl.sigma || fl.beta || fl.tInit || fl.bigM;
    if (fl.defaultMode && lsFlags)
        throw ConfigError("default-mode", "cannot be combined with --line-search or line-search parameters");
    SolverConfig cfg;
    cfg.methodName = fl.method;
    cfg.methodGroup = fl.group;
    cfg.defaultMode = !lsFlags;
    if (lsFlags) {
        if (!fl.lineSearch) throw ConfigError("line-search", "line-search parameters need --line-search");
        LineSearchConfig ls = default_line_search_config(parse_line_search_rule(*fl.lineSearch));
        if (fl.rho) ls.rho = *fl.rho;
        if (fl.sigma) ls.sigma = *fl.sigma;
        if (fl.beta) ls.beta = *fl.beta;
        if (fl.tInit) ls.tInit = *fl.tInit;
        if (fl.bigM) ls.bigM = *fl.bigM;
        cfg.lineSearch = ls;
    }
    if (fl.maxIter) cfg.stopping.maxIterNum = *fl.maxIter;
    if (fl.epsilon) cfg.stopping.epsilon = *fl.epsilon;
    if (fl.workPrec) cfg.stopping.workPrec = *fl.workPrec;
    for (const auto& kv : fl.extras) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("extra", "expected key=value, got '" + kv + "'");
        try {
            cfg.extras[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::logic_error&) {
            throw ConfigError(kv.substr(0, eq), "value is not a number");
        }
    }
    return resolve_config(cfg);
}

int run_solve(const SolveFlags& fl) {
    const SolverConfig cfg = build_config(fl);
    const MethodInfo& info = method_info(cfg.methodName);
    const FunctionSpec spec = function_spec(fl.function);

    std::optional<Vector> x0;
    if (fl.x0) x0 = parse_x0(*fl.x0);
    Index n = fl.n ? *fl.n : (x0 ? x0->size() : default_dimension(spec, info.derivativeOrder >= 2));
    if (!spec.admits(n)) {
        throw ConfigError("n", fl.function + " needs a dimension that is " + spec.dimension_constraint() +
                                   " and at least " + std::to_string(spec.minDimension));
    }
    if (x0 && x0->size() != n) throw ConfigError("x0", "has " + std::to_string(x0->size()) + " coordinates, n is " +
                                                         std::to_string(n));
    if (!x0) x0 = starting_point(fl.function, n);

    const SolveReport rep = solve(make_objective(fl.function, n), *x0, cfg);

    if (fl.trace) {
        std::ofstream os(*fl.trace);
        if (!os) throw Error(ErrorCode::IoError, "cannot write " + *fl.trace);
        os << "iteration,f,gnorm\n";
        char buf[96];
        for (std::size_t i = 0; i < rep.trace.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, rep.trace.functionValue[i],
                          rep.trace.gradientNorm[i]);
            os << buf;
        }
    }

    if (fl.output == "structured") {
        Json j = {{"function", fl.function}, {"n", n}, {"x0", to_json(*x0)}, {"config", to_json(cfg)},
                  {"report", to_json(rep)}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::string xs = "[";
        const Index shown = std::min<Index>(rep.xmin.size(), 10);
        for (Index i = 0; i < shown; ++i) xs += (i ? ", " : "") + fmt(rep.xmin[i]);
        if (rep.xmin.size() > shown) xs += ", ...";
        xs += "]";
        std::cout << "function      " << fl.function << " (n = " << n << ")\n"
                  << "method        " << info.group << " / " << info.name << '\n'
                  << "line search   " << (cfg.lineSearch ? describe(*cfg.lineSearch) : std::string("none")) << '\n'
                  << "Fmin          " << fmt(rep.fmin) << '\n'
                  << "Xmin          " << xs << '\n'
                  << "gradient norm " << fmt(rep.final_gradient_norm()) << '\n'
                  << "iterations    " << rep.iterations << '\n'
                  << "cpu seconds   " << fmt(rep.cpuSeconds) << '\n'
                  << "n_value       " << rep.counters.nValue << '\n'
                  << "n_gradient    " << rep.counters.nGradient << '\n'
                  << "n_hessian     " << rep.counters.nHessian << '\n'
                  << "termination   " << to_string(rep.terminationReason) << '\n';
        if (!rep.message.empty()) std::cout << "message       " << rep.message << '\n';
    }
    return exit_code(rep.terminationReason);
}

int run_bench(const std::string& configPath, const std::string& outDir, int parallel) {
    const BenchConfig cfg = load_bench_config(configPath);
    const auto records = run_matrix(cfg.solvers, cfg.problems, cfg.stopping, parallel);
    std::filesystem::create_directories(outDir);
    const std::filesystem::path dir(outDir);
    export_records_csv((dir / "records.csv").string(), records);
    for (MeasureKind k : kAllMeasures) {
        const std::string path = (dir / ("profile_" + std::string(to_string(k)) + ".csv")).string();
        std::ofstream os(path);
        if (!os) throw Error(ErrorCode::IoError, "cannot write " + path);
        write_profile_csv(os, performance_profile(records, k));
    }
    const auto solved = std::count_if(records.begin(), records.end(), [](const RunRecord& r) { return r.solved; });
    std::cout << records.size() << " runs, " << solved << " solved; output in " << outDir << '\n';
    return 0;
}

int run_list(const std::string& kind) {
    if (kind == "functions") {
        for (const auto& s : catalog()) {
            std::cout << s.name << "  n: " << s.dimension_constraint() << ", >= " << s.minDimension
                      << "  order: " << (s.supports.hessian ? 2 : 1) << '\n';
        }
    } else if (kind == "methods") {
        for (const auto& g : method_groups()) {
            std::cout << g << '\n';
            for (const auto& m : method_registry()) {
                if (m.group != g) continue;
                std::cout << "  " << m.name << "  order: " << m.derivativeOrder
                          << "  line search: " << (m.usesLineSearch ? "yes" : "no") << '\n';
            }
        }
    } else if (kind == "linesearches") {
        std::vector<std::string> ids;
        for (LineSearchRule r : all_line_search_rules()) ids.emplace_back(to_string(r));
        std::sort(ids.begin(), ids.end());
        for (const auto& id : ids) {
            const LineSearchParamUse u = parameters_used_by(parse_line_search_rule(id));
            std::string params;
            auto add = [&](bool on, const char* name) {
                if (on) params += (params.empty() ? "" : ",") + std::string(name);
            };
            add(u.rho, "rho");
            add(u.sigma, "sigma");
            add(u.beta, "beta");
            add(u.tInit, "tInit");
            add(u.bigM, "M");
            std::cout << id << "  params: " << params << '\n';
        }
    } else {
        throw ConfigError("kind", "expected functions, methods, or linesearches");
    }
    return 0;
}

int run_defaults(const std::string& method, const std::string& output) {
    if (output == "structured") {
        std::cout << defaults_json(method).dump(2) << '\n';
        return 0;
    }
    const MethodInfo& info = method_info(method);
    const DefaultPairing p = default_pairing(method);
    std::cout << info.name << " (" << info.group << ")\n"
              << "line search   " << (p.lineSearch ? describe(*p.lineSearch) : std::string("none")) << '\n';
    for (const auto& [k, v] : p.extras) std::cout << k << " = " << fmt(v) << '\n';
    const StoppingCriteria s;
    std::cout << "maxIter = " << s.maxIterNum << ", epsilon = " << fmt(s.epsilon) << ", workPrec = " << fmt(s.workPrec)
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unconstrained optimization workbench"};
    app.require_subcommand(1);

    SolveFlags fl;
    auto* solveCmd = app.add_subcommand("solve", "Run one method on one test function");
    solveCmd->add_option("--function", fl.function, "Test function name")->required();
    solveCmd->add_option("--method", fl.method, "Method name")->required();
    solveCmd->add_option("--group", fl.group, "Method group (checked against the method)");
    solveCmd->add_option("--n", fl.n, "Dimension");
    solveCmd->add_option("--x0", fl.x0, "Starting point, comma separated");
    solveCmd->add_option("--line-search", fl.lineSearch, "Line-search rule (manual mode)");
    solveCmd->add_option("--rho", fl.rho);
    solveCmd->add_option("--sigma", fl.sigma);
    solveCmd->add_option("--beta", fl.beta);
    solveCmd->add_option("--t-init", fl.tInit);
    solveCmd->add_option("--big-m", fl.bigM);
    solveCmd->add_option("--max-iter", fl.maxIter);
    solveCmd->add_option("--epsilon", fl.epsilon);
    solveCmd->add_option("--work-prec", fl.workPrec);
    solveCmd->add_option("--extra", fl.extras, "Method parameter key=value (repeatable)");
    solveCmd->add_flag("--default-mode", fl.defaultMode, "Use the method's default pairing");
    solveCmd->add_option("--output", fl.output)->check(CLI::IsMember({"text", "structured"}));
    solveCmd->add_option("--trace", fl.trace, "Write iteration,f,gnorm CSV");

    std::string benchConfig, benchOut = "bench_out";
    int parallel = 1;
    auto* benchCmd = app.add_subcommand("bench", "Run a solver x problem matrix");
    benchCmd->add_option("config", benchConfig, "JSON benchmark config")->required();
    benchCmd->add_option("--out", benchOut, "Output directory");
    benchCmd->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);

    std::string listKind;
    auto* listCmd = app.add_subcommand("list", "List registries");
    listCmd->add_option("kind", listKind)->required()->check(CLI::IsMember({"functions", "methods", "linesearches"}));

    std::string defMethod, defOutput = "text";
    auto* defCmd = app.add_subcommand("defaults", "Show a method's default pairing");
    defCmd->add_option("--method,method", defMethod)->required();
    defCmd->add_option("--output", defOutput)->check(CLI::IsMember({"text", "structured"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*solveCmd) return run_solve(fl);
        if (*benchCmd) return run_bench(benchConfig, benchOut, parallel);
        if (*listCmd) return run_list(listKind);
        if (*defCmd) return run_defaults(defMethod, defOutput);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << flag_for(e.field()) << ": " << e.detail() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
