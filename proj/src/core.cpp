#include "optlab/core.hpp"

#include <cmath>
#include <sstream>

namespace optlab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnsupportedDerivative: return "UnsupportedDerivative";
        case ErrorCode::NonFiniteResult: return "NonFiniteResult";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::UnknownFunction: return "UnknownFunction";
        case ErrorCode::UnknownMethod: return "UnknownMethod";
        case ErrorCode::UnknownLineSearch: return "UnknownLineSearch";
        case ErrorCode::DuplicateName: return "DuplicateName";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::LineSearchFailure: return "LineSearchFailure";
        case ErrorCode::NotDescentDirection: return "NotDescentDirection";
        case ErrorCode::RoundingStall: return "RoundingStall";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NonPositiveCurvature: return "NonPositiveCurvature";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Objective::Objective(std::string name, Index dimension, DerivativeSupport supports, Evaluator evaluator)
    : name_(std::make_shared<const std::string>(std::move(name))),
      dimension_(dimension),
      supports_(supports),
      evaluator_(std::make_shared<const Evaluator>(std::move(evaluator))) {
    if (dimension_ < 1) {
        throw Error(ErrorCode::DimensionMismatch, "objective '" + *name_ + "' needs dimension >= 1");
    }
}

bool all_finite(const Vector& v) noexcept {
    for (Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) return false;
    }
    return true;
}

namespace {

[[noreturn]] void non_finite(const Objective& f, const char* what) {
    throw Error(ErrorCode::NonFiniteResult, "objective '" + f.name() + "' returned a non-finite " + what);
}

}  // namespace

EvalResult evaluate(const Objective& f, const Vector& x, const EvalRequest& req, EvalCounters& counters) {
    if (!req.any()) {
        throw Error(ErrorCode::InvalidConfig, "evaluation request must set at least one flag");
    }
    if (x.size() != f.dimension()) {
        std::ostringstream os;
        os << "objective '" << f.name() << "' has dimension " << f.dimension() << ", point has " << x.size();
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    if (req.gradient && !f.supports().gradient) {
        throw Error(ErrorCode::UnsupportedDerivative, "objective '" + f.name() + "' does not implement a gradient");
    }
    if (req.hessian && !f.supports().hessian) {
        throw Error(ErrorCode::UnsupportedDerivative, "objective '" + f.name() + "' does not implement a Hessian");
    }

    if (req.value) ++counters.nValue;
    if (req.gradient) ++counters.nGradient;
    if (req.hessian) ++counters.nHessian;

    EvalResult r = f.raw(x, req);

    if (req.value) {
        if (!r.value) throw Error(ErrorCode::UnsupportedDerivative, "objective '" + f.name() + "' returned no value");
        if (!std::isfinite(*r.value)) non_finite(f, "value");
    } else {
        r.value.reset();
    }
    if (req.gradient) {
        if (!r.gradient || r.gradient->size() != f.dimension()) {
            throw Error(ErrorCode::UnsupportedDerivative, "objective '" + f.name() + "' returned no gradient");
        }
        if (!all_finite(*r.gradient)) non_finite(f, "gradient");
    } else {
        r.gradient.reset();
    }
    if (req.hessian) {
        if (!r.hessian || r.hessian->rows() != f.dimension() || r.hessian->cols() != f.dimension()) {
            throw Error(ErrorCode::UnsupportedDerivative, "objective '" + f.name() + "' returned no Hessian");
        }
        if (!r.hessian->allFinite()) non_finite(f, "Hessian");
    } else {
        r.hessian.reset();
    }
    return r;
}

double evaluate_value(const Objective& f, const Vector& x, EvalCounters& counters) {
    return *evaluate(f, x, EvalRequest::Value(), counters).value;
}

std::string_view to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::MaxIterations: return "MaxIterations";
        case TerminationReason::GradientTolerance: return "GradientTolerance";
        case TerminationReason::WorkPrecision: return "WorkPrecision";
        case TerminationReason::LineSearchFailure: return "LineSearchFailure";
        case TerminationReason::NumericalFailure: return "NumericalFailure";
    }
    return "Unknown";
}

std::optional<TerminationReason> parse_termination_reason(std::string_view text) {
    for (auto r : {TerminationReason::MaxIterations, TerminationReason::GradientTolerance,
                   TerminationReason::WorkPrecision, TerminationReason::LineSearchFailure,
                   TerminationReason::NumericalFailure}) {
        if (to_string(r) == text) return r;
    }
    return std::nullopt;
}

void StoppingCriteria::validate() const {
    if (maxIterNum < 1) throw ConfigError("maxIter", "must be a positive integer");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon", "must be a positive real");
    if (!(workPrec >= 0.0) || !std::isfinite(workPrec)) throw ConfigError("workPrec", "must be nonnegative");
}

std::optional<TerminationReason> should_stop(long k, double gradient_norm, std::optional<double> f_prev,
                                             double f_curr, const StoppingCriteria& criteria) {
    if (k >= criteria.maxIterNum) return TerminationReason::MaxIterations;
    if (gradient_norm <= criteria.epsilon) return TerminationReason::GradientTolerance;
    if (f_prev && std::abs(*f_prev - f_curr) / (1.0 + std::abs(f_curr)) <= criteria.workPrec) {
        return TerminationReason::WorkPrecision;
    }
    return std::nullopt;
}

}  // namespace optlab
