#include "optlab/bench.hpp"

#include "optlab/functions.hpp"
#include "optlab/methods.hpp"
#include "optlab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace optlab {

bool counts_as_solved(TerminationReason r) {
    return r == TerminationReason::GradientTolerance || r == TerminationReason::WorkPrecision;
}

bool same_measures(const RunRecord& a, const RunRecord& b) {
    RunRecord x = a;
    x.cpuSeconds = b.cpuSeconds;
    return x == b;
}

bool same_measures(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!same_measures(a[i], b[i])) return false;
    return true;
}

void validate_matrix(const std::vector<SolverSpec>& solvers, const std::vector<ProblemSpec>& problems) {
    if (solvers.empty()) throw ConfigError("solvers", "at least one solver is required");
    if (problems.empty()) throw ConfigError("problems", "at least one problem is required");
    std::set<std::string> ids;
    for (const auto& s : solvers) {
        if (s.id.empty()) throw ConfigError("solvers", "solver id must not be empty");
        if (!ids.insert(s.id).second) throw ConfigError("solvers", "duplicate solver id '" + s.id + "'");
        resolve_config(s.config);
    }
    for (const auto& p : problems) {
        const FunctionSpec spec = function_spec(p.function);
        if (!spec.admits(p.n)) {
            throw Error(ErrorCode::DimensionMismatch, p.function + " does not admit n = " + std::to_string(p.n) +
                                                          " (" + spec.dimension_constraint() + ")");
        }
        if (p.x0 && p.x0->size() != p.n)
            throw Error(ErrorCode::DimensionMismatch, "x0 for " + p.function + " has the wrong length");
    }
}

namespace {

double quantise(double seconds) { return std::round(seconds * 1e6) / 1e6; }

RunRecord run_one(const SolverSpec& s, const ProblemSpec& p, const StoppingCriteria& stopping) {
    RunRecord rec;
    rec.solver = s.id;
    rec.problem = p.function;
    rec.n = p.n;
    try {
        const Objective f = make_objective(p.function, p.n);
        const Vector x0 = p.x0 ? *p.x0 : starting_point(p.function, p.n);
        SolverConfig cfg = s.config;
        cfg.stopping = stopping;
        const SolveReport rep = solve(f, x0, cfg);
        rec.iterations = rep.iterations;
        rec.cpuSeconds = quantise(rep.cpuSeconds);
        rec.counters = rep.counters;
        rec.reason = rep.terminationReason;
    } catch (const std::exception&) {
        rec.reason = TerminationReason::NumericalFailure;
    }
    rec.solved = counts_as_solved(rec.reason);
    return rec;
}

}  // namespace

std::vector<RunRecord> run_matrix(const std::vector<SolverSpec>& solvers, const std::vector<ProblemSpec>& problems,
                                  const StoppingCriteria& stopping, int parallelism) {
    if (parallelism < 1) throw ConfigError("parallel", "must be a positive integer");
    validate_matrix(solvers, problems);
    stopping.validate();
    const long np = static_cast<long>(problems.size());
    const long total = static_cast<long>(solvers.size()) * np;
    std::vector<RunRecord> out(static_cast<std::size_t>(total));
#pragma omp parallel for num_threads(parallelism) schedule(dynamic, 1)
    for (long i = 0; i < total; ++i) {
        out[static_cast<std::size_t>(i)] = run_one(solvers[static_cast<std::size_t>(i / np)],
                                                   problems[static_cast<std::size_t>(i % np)], stopping);
    }
    return out;
}

std::vector<RunRecord> run_matrix_serial(const std::vector<SolverSpec>& solvers,
                                         const std::vector<ProblemSpec>& problems, const StoppingCriteria& stopping) {
    validate_matrix(solvers, problems);
    stopping.validate();
    std::vector<RunRecord> out;
    out.reserve(solvers.size() * problems.size());
    for (const auto& s : solvers)
        for (const auto& p : problems) out.push_back(run_one(s, p, stopping));
    return out;
}

std::string_view to_string(MeasureKind k) {
    switch (k) {
        case MeasureKind::Iterations: return "iterations";
        case MeasureKind::Cpu: return "cpu";
        case MeasureKind::Evaluations: return "evaluations";
    }
    return "?";
}

MeasureKind parse_measure_kind(std::string_view s) {
    for (MeasureKind k : kAllMeasures)
        if (to_string(k) == s) return k;
    throw ConfigError("measure", "unknown measure '" + std::string(s) + "'");
}

double measure(const RunRecord& r, MeasureKind k) {
    switch (k) {
        case MeasureKind::Iterations: return static_cast<double>(r.iterations);
        case MeasureKind::Cpu: return r.cpuSeconds;
        case MeasureKind::Evaluations: return static_cast<double>(r.counters.total());
    }
    return 0.0;
}

double ProfileTable::at(const std::string& solver, double t) const {
    const auto it = std::find(solvers.begin(), solvers.end(), solver);
    if (it == solvers.end()) throw Error(ErrorCode::UnknownMethod, "solver '" + solver + "' not in profile");
    const std::size_t s = static_cast<std::size_t>(it - solvers.begin());
    if (problems.empty()) return 0.0;
    std::size_t count = 0;
    for (const auto& row : ratio)
        if (row[s] <= t) ++count;
    return static_cast<double>(count) / static_cast<double>(problems.size());
}

ProfileTable performance_profile(const std::vector<RunRecord>& records, MeasureKind kind) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    ProfileTable t;
    t.kind = kind;
    std::set<std::string> solverSet, problemSet;
    std::map<std::pair<std::string, std::string>, double> m;
    for (const auto& r : records) {
        const std::string pid = r.problem + "/" + std::to_string(r.n);
        solverSet.insert(r.solver);
        problemSet.insert(pid);
        double v = inf;
        if (r.solved) {
            v = measure(r, kind);
            if (v <= 0.0) {
                v = std::numeric_limits<double>::epsilon();
                t.substitutedZero = true;
            }
        }
        m[{pid, r.solver}] = v;
    }
    if (solverSet.empty()) throw ConfigError("records", "no records to profile");
    t.solvers.assign(solverSet.begin(), solverSet.end());
    t.problems.assign(problemSet.begin(), problemSet.end());

    std::set<double> grid{1.0};
    for (const auto& p : t.problems) {
        std::vector<double> row;
        double best = inf;
        for (const auto& s : t.solvers) {
            const auto it = m.find({p, s});
            row.push_back(it == m.end() ? inf : it->second);
            best = std::min(best, row.back());
        }
        for (double& v : row) {
            v = (std::isfinite(v) && std::isfinite(best)) ? v / best : inf;
            if (std::isfinite(v)) grid.insert(v);
        }
        t.ratio.push_back(std::move(row));
    }
    t.tau.assign(grid.begin(), grid.end());
    for (std::size_t s = 0; s < t.solvers.size(); ++s) {
        std::vector<double> curve;
        for (double tau : t.tau) curve.push_back(t.at(t.solvers[s], tau));
        t.rho.push_back(std::move(curve));
    }
    return t;
}

// --- CSV ---------------------------------------------------------------------

namespace {

constexpr const char* kHeader = "solver,problem,n,iterations,cpu_seconds,n_value,n_gradient,n_hessian,solved,reason";

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

[[noreturn]] void bad_csv(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::IoError, "records csv line " + std::to_string(line) + ": " + what);
}

long to_long(const std::string& s, std::size_t line) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) bad_csv(line, "bad integer '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        bad_csv(line, "bad integer '" + s + "'");
    }
}

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records) {
    os << kHeader << '\n';
    char cpu[64];
    for (const auto& r : records) {
        std::snprintf(cpu, sizeof cpu, "%.6f", r.cpuSeconds);
        os << csv_field(r.solver) << ',' << csv_field(r.problem) << ',' << r.n << ',' << r.iterations << ',' << cpu
           << ',' << r.counters.nValue << ',' << r.counters.nGradient << ',' << r.counters.nHessian << ','
           << (r.solved ? "true" : "false") << ',' << to_string(r.reason) << '\n';
    }
}

std::vector<RunRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::IoError, "records csv is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw Error(ErrorCode::IoError, "records csv has an unexpected header");
    std::vector<RunRecord> out;
    std::size_t lineNo = 1;
    while (std::getline(is, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 10) bad_csv(lineNo, "expected 10 fields");
        RunRecord r;
        r.solver = f[0];
        r.problem = f[1];
        r.n = to_long(f[2], lineNo);
        r.iterations = to_long(f[3], lineNo);
        try {
            r.cpuSeconds = std::stod(f[4]);
        } catch (const std::logic_error&) {
            bad_csv(lineNo, "bad cpu_seconds");
        }
        r.counters.nValue = to_long(f[5], lineNo);
        r.counters.nGradient = to_long(f[6], lineNo);
        r.counters.nHessian = to_long(f[7], lineNo);
        if (f[8] != "true" && f[8] != "false") bad_csv(lineNo, "solved must be true or false");
        r.solved = f[8] == "true";
        const auto reason = parse_termination_reason(f[9]);
        if (!reason) bad_csv(lineNo, "unknown reason '" + f[9] + "'");
        r.reason = *reason;
        out.push_back(std::move(r));
    }
    return out;
}

void export_records_csv(const std::string& path, const std::vector<RunRecord>& records) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + path);
    write_records_csv(os, records);
    if (!os) throw Error(ErrorCode::IoError, "write failed for " + path);
}

std::vector<RunRecord> import_records_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::IoError, "cannot read " + path);
    return read_records_csv(is);
}

void write_profile_csv(std::ostream& os, const ProfileTable& table) {
    os << "tau";
    for (const auto& s : table.solvers) os << ',' << csv_field(s);
    os << '\n';
    char buf[64];
    for (std::size_t i = 0; i < table.tau.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", table.tau[i]);
        os << buf;
        for (std::size_t s = 0; s < table.solvers.size(); ++s) {
            std::snprintf(buf, sizeof buf, "%.17g", table.rho[s][i]);
            os << ',' << buf;
        }
        os << '\n';
    }
}

std::vector<PlotPoint> plot_data(const std::vector<double>& series, bool logScale, long lo, long hi) {
    const long len = static_cast<long>(series.size());
    if (len == 0 || lo < 0 || lo > hi || lo >= len)
        throw Error(ErrorCode::EmptyWindow, "plot window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                                "] is empty for a series of length " + std::to_string(len));
    hi = std::min(hi, len - 1);
    std::vector<PlotPoint> out;
    out.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long i = lo; i <= hi; ++i) {
        const double v = series[static_cast<std::size_t>(i)];
        out.push_back({i, logScale ? std::log10(std::max(v, 1e-300)) : v});
    }
    return out;
}

}  // namespace optlab
