#pragma once

#include "optlab/config.hpp"
#include "optlab/core.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace optlab {

struct SolverSpec {
    std::string id;       // label used in records and profiles
    SolverConfig config;  // stopping is replaced by the matrix-level criteria
};

struct ProblemSpec {
    std::string function;
    Index n = 0;
    std::optional<Vector> x0;  // collection starting point when absent
};

struct RunRecord {
    std::string solver;
    std::string problem;
    Index n = 0;
    long iterations = 0;
    double cpuSeconds = 0.0;  // quantised to 1e-6
    EvalCounters counters;
    bool solved = false;
    TerminationReason reason = TerminationReason::NumericalFailure;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Equality of every field except cpuSeconds.
bool same_measures(const RunRecord& a, const RunRecord& b);
bool same_measures(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b);

bool counts_as_solved(TerminationReason r);

/// Checks ids and dimensions before anything runs. Throws ConfigError / Error.
void validate_matrix(const std::vector<SolverSpec>& solvers, const std::vector<ProblemSpec>& problems);

/// Every solver on every problem, solver-major order, on up to `parallelism`
/// OpenMP threads. Per-run failures become records.
std::vector<RunRecord> run_matrix(const std::vector<SolverSpec>& solvers, const std::vector<ProblemSpec>& problems,
                                  const StoppingCriteria& stopping, int parallelism);

/// Single-threaded reference for run_matrix.
std::vector<RunRecord> run_matrix_serial(const std::vector<SolverSpec>& solvers,
                                         const std::vector<ProblemSpec>& problems, const StoppingCriteria& stopping);

enum class MeasureKind { Iterations, Cpu, Evaluations };
std::string_view to_string(MeasureKind k);
/// Throws Error(InvalidConfig).
MeasureKind parse_measure_kind(std::string_view s);
inline constexpr MeasureKind kAllMeasures[] = {MeasureKind::Iterations, MeasureKind::Cpu, MeasureKind::Evaluations};

/// iterations, cpuSeconds, or nValue + nGradient + nHessian.
double measure(const RunRecord& r, MeasureKind k);

struct ProfileTable {
    MeasureKind kind = MeasureKind::Iterations;
    std::vector<std::string> solvers;             // sorted
    std::vector<std::string> problems;            // "function/n", sorted
    std::vector<std::vector<double>> ratio;       // ratio[p][s], +inf when unsolved
    std::vector<double> tau;                      // breakpoints, ascending, contains 1
    std::vector<std::vector<double>> rho;         // rho[s][i] at tau[i]
    bool substitutedZero = false;                 // some measure 0 was replaced by machine epsilon

    /// rho_s(t) for arbitrary t >= 1 (step function).
    double at(const std::string& solver, double t) const;
};

ProfileTable performance_profile(const std::vector<RunRecord>& records, MeasureKind kind);

void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records);
/// Throws Error(IoError) on malformed input.
std::vector<RunRecord> read_records_csv(std::istream& is);
void export_records_csv(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> import_records_csv(const std::string& path);

/// Header "tau,<solver>...", one row per breakpoint.
void write_profile_csv(std::ostream& os, const ProfileTable& table);

struct PlotPoint {
    long iteration;
    double value;
};

/// Points lo..hi (inclusive, hi clamped to the last index), log10(max(v, 1e-300))
/// when `logScale`. Throws Error(EmptyWindow).
std::vector<PlotPoint> plot_data(const std::vector<double>& series, bool logScale, long lo, long hi);

}  // namespace optlab
