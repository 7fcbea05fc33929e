// run_matrix on OpenMP threads versus the serial reference.

#include "optlab/bench.hpp"

#include <benchmark/benchmark.h>

using namespace optlab;

namespace {

std::vector<SolverSpec> solvers() {
    std::vector<SolverSpec> out;
    for (const char* m : {"BFGS", "L-BFGS", "CG_DESCENT", "PolakRibiere", "BarzilaiBorwein", "Newton"}) {
        SolverSpec s;
        s.id = m;
        s.config.methodName = m;
        out.push_back(s);
    }
    return out;
}

std::vector<ProblemSpec> problems() {
    return {{"ExtRosenbrock", 50, {}}, {"ExtPowell", 40, {}}, {"Raydan1", 50, {}},
            {"ExtWhiteHolst", 50, {}}, {"PerturbedQuadratic", 30, {}}, {"ExtTridiagonal1", 50, {}}};
}

void BM_RunMatrixSerial(benchmark::State& state) {
    const auto s = solvers();
    const auto p = problems();
    for (auto _ : state) benchmark::DoNotOptimize(run_matrix_serial(s, p, StoppingCriteria{}));
}

void BM_RunMatrixParallel(benchmark::State& state) {
    const auto s = solvers();
    const auto p = problems();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_matrix(s, p, StoppingCriteria{}, threads));
}

}  // namespace

BENCHMARK(BM_RunMatrixSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunMatrixParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
