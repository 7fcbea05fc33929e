#pragma once

#include "optlab/config.hpp"
#include "optlab/core.hpp"

#include <deque>
#include <memory>
#include <optional>

namespace optlab {

/// One step-size problem: minimise phi(t) = f(x + t d) approximately.
struct LineSearchProblem {
    const Vector& x;
    const Vector& d;
    double f0;                         // f(x)
    const Vector& g0;                  // grad f(x)
    std::optional<double> trialStep;   // overrides cfg.tInit for this call

    double slope() const { return g0.dot(d); }
};

struct LineSearchOutcome {
    double t = 0.0;
    Vector xNew;           // exactly x + t * d
    double fNew = 0.0;
    Vector gNew;
    EvalCounters counters; // evaluations spent by this search
};

/// Caller-owned memory of earlier iterations for the nonmonotone rule and the
/// two step-size heuristics.
class HistoryWindow {
public:
    explicit HistoryWindow(std::size_t capacity = 1);

    /// Records f(x_k) as the most recent value; drops the oldest beyond capacity.
    void push(double f);
    /// max_j f(x_{k-j}) over the stored values.
    double reference_value() const;
    const std::deque<double>& values() const noexcept { return values_; }
    std::size_t capacity() const noexcept { return capacity_; }
    void clear();

    std::optional<double> step;          // step carried between iterations
    std::optional<double> previousValue; // f(x_{k-1})

private:
    std::size_t capacity_;
    std::deque<double> values_;  // most recent first
};

// Individual rules. Each returns the accepted step with the new point, value,
// and gradient, or throws Error(LineSearchFailure / NotDescentDirection /
// RoundingStall / NonFiniteResult).

LineSearchOutcome fixed_step(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg);

/// Halves the carried step until f decreases. c1 = 0.5.
LineSearchOutcome corr_prev_iter(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg,
                                 HistoryWindow& window);

/// Grows the carried step by c2 = 1.2 after two consecutive decreases, halves
/// it on an increase, otherwise keeps it.
LineSearchOutcome corr_prev_two_iter(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg,
                                     HistoryWindow& window);

LineSearchOutcome backtracking(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg);

/// Sufficient decrease via safeguarded quadratic-then-cubic interpolation.
LineSearchOutcome armijo_interp(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg);

LineSearchOutcome goldstein(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg);

/// Bracketing phase followed by zoom; weak or strong curvature condition.
LineSearchOutcome wolfe(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg, bool strong);

/// Hager-Zhang search accepting Wolfe or approximate-Wolfe points.
LineSearchOutcome approx_wolfe(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg);

LineSearchOutcome more_thuente(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg);

/// `window` must already hold f(x_k) at its front; it is not modified.
LineSearchOutcome non_monotone(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg,
                               const HistoryWindow& window);

/// Stateful step-size procedure used by the solvers. One instance per run.
class LineSearch {
public:
    virtual ~LineSearch() = default;
    virtual LineSearchOutcome search(const Objective& f, const LineSearchProblem& p) = 0;
};

/// Owns the HistoryWindow for rules that need one.
class RuleLineSearch final : public LineSearch {
public:
    explicit RuleLineSearch(LineSearchConfig cfg);

    LineSearchOutcome search(const Objective& f, const LineSearchProblem& p) override;

    const LineSearchConfig& config() const noexcept { return cfg_; }
    const HistoryWindow& window() const noexcept { return window_; }

private:
    LineSearchConfig cfg_;
    HistoryWindow window_;
};

std::unique_ptr<LineSearch> make_line_search(const LineSearchConfig& cfg);

namespace detail {
/// Minimiser of the quadratic through phi(a), phi'(a), phi(b).
double quadratic_minimizer(double a, double fa, double ga, double b, double fb);
/// Minimiser of the cubic through phi(a), phi'(a), phi(b), phi'(b); nullopt when
/// the cubic has no real minimiser.
std::optional<double> cubic_minimizer(double a, double fa, double ga, double b, double fb, double gb);
}  // namespace detail

}  // namespace optlab
