#pragma once

#include "optlab/linesearch.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

namespace optlab::detail {

inline constexpr double kStepFloor = 1e-20;
inline constexpr int kMaxBacktracks = 60;
inline constexpr int kMaxZoom = 50;
inline constexpr int kMaxBisections = 100;
inline constexpr double kMaxBracketStep = 1e10;

struct Trial {
    double t = 0.0;
    Vector x;
    double f = std::numeric_limits<double>::infinity();
    std::optional<Vector> g;
    double dphi = std::numeric_limits<double>::quiet_NaN();
    bool finite = false;
};

/// Counted evaluations of phi(t) = f(x + t d). Non-finite trial values are
/// reported as f = +inf instead of throwing, so searches can back off.
class Phi {
public:
    Phi(const Objective& f, const LineSearchProblem& p) : f_(f), p_(p), dphi0_(p.slope()) {}

    double f0() const { return p_.f0; }
    double dphi0() const { return dphi0_; }
    EvalCounters counters() const { return counters_; }

    Trial value(double t) { return eval(t, EvalRequest::Value()); }
    Trial value_grad(double t) { return eval(t, EvalRequest::ValueGradient()); }

    /// Armijo test in canonical form: phi(t) <= phi(0) + rho t phi'(0).
    bool armijo(const Trial& tr, double rho) const { return tr.f <= p_.f0 + rho * tr.t * dphi0_; }

    LineSearchOutcome accept(Trial tr) {
        if (!tr.finite) fail("accepted step is not finite");
        if (!tr.g) {
            tr.g = *evaluate(f_, tr.x, EvalRequest::Gradient(), counters_).gradient;
        }
        LineSearchOutcome out;
        out.t = tr.t;
        out.xNew = std::move(tr.x);
        out.fNew = tr.f;
        out.gNew = std::move(*tr.g);
        out.counters = counters_;
        return out;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::LineSearchFailure, what);
    }

private:
    Trial eval(double t, EvalRequest req) {
        Trial tr;
        tr.t = t;
        tr.x = p_.x + t * p_.d;
        try {
            EvalResult r = evaluate(f_, tr.x, req, counters_);
            tr.f = *r.value;
            if (r.gradient) {
                tr.dphi = r.gradient->dot(p_.d);
                tr.g = std::move(*r.gradient);
            }
            tr.finite = true;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonFiniteResult) throw;
            tr.f = std::numeric_limits<double>::infinity();
            tr.dphi = std::numeric_limits<double>::quiet_NaN();
            tr.finite = false;
        }
        return tr;
    }

    const Objective& f_;
    const LineSearchProblem& p_;
    double dphi0_;
    EvalCounters counters_;
};

inline void require_descent(double dphi0) {
    if (!(dphi0 < 0.0)) {
        std::ostringstream os;
        os << "search direction is not a descent direction (g'd = " << dphi0 << ")";
        throw Error(ErrorCode::NotDescentDirection, os.str());
    }
}

inline double initial_step(const LineSearchProblem& p, const LineSearchConfig& cfg) {
    const double t = p.trialStep.value_or(cfg.tInit);
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw ConfigError("tInit", "initial step must be a positive finite real");
    }
    return t;
}

}  // namespace optlab::detail
