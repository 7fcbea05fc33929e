#pragma once

#include "optlab/config.hpp"
#include "optlab/core.hpp"
#include "optlab/linesearch.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <optional>

namespace optlab {

/// Snapshot handed to an observer after every completed iteration.
struct IterationEvent {
    long k;                  // iteration just completed (1-based)
    const Vector& x;         // new iterate
    const Vector& g;         // gradient at x
    const Vector& d;         // direction used
    double t;                // accepted step (1 for trust-region steps)
    double f;
    double gPrevDotD;        // g_{k-1}'d, the slope the line search saw
    std::optional<double> beta;   // CG methods
    const Matrix* inverseHessian; // dense quasi-Newton methods, after the update
    bool accepted = true;         // false for rejected trust-region trials
};

using IterationObserver = std::function<void(const IterationEvent&)>;

struct SolveOptions {
    /// Replaces the configured line search (tests use exact searches here).
    std::shared_ptr<LineSearch> lineSearch;
    IterationObserver observer;
    /// Stop with MaxIterations once passed.
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Runs the configured method from x0. The config is resolved first
/// (default mode, validation). Throws ConfigError, UnknownMethod,
/// UnsupportedDerivative, or DimensionMismatch before iterating; failures during
/// the run are reported through terminationReason.
SolveReport solve(const Objective& f, const Vector& x0, const SolverConfig& config, const SolveOptions& options = {});

enum class CgVariant { FletcherReeves, PolakRibierePlus, HestenesStiefel, DaiYuan, HagerZhang };

/// beta_k from the current gradient, previous gradient and previous direction.
/// nullopt when the denominator is below 1e-30 in magnitude (restart).
std::optional<double> cg_beta(CgVariant variant, const Vector& g, const Vector& gPrev, const Vector& pPrev);

/// s'y / y'y; 1 when y = 0 or the ratio is not positive and finite.
double barzilai_borwein_step(const Vector& s, const Vector& y);

/// r = s - t y; s'r / y'r when y'r > 0, otherwise |s| / |y|; 1 when y = 0.
double scalar_correction_step(const Vector& s, const Vector& y, double t);

/// Solves (G + lambda D) d = -g with D = I, or D = diag(max(|G_ii|, 1e-8))
/// when `marquardt`. Throws Error(SingularMatrix).
Vector levenberg_direction(const Matrix& G, const Vector& g, double lambda, bool marquardt);

/// Newton direction if its angle with -g has cosine >= eta, otherwise -g.
Vector goldstein_price_direction(const Matrix& G, const Vector& g, double eta);

}  // namespace optlab
