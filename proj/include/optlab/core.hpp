#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace optlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorCode {
    UnsupportedDerivative,
    NonFiniteResult,
    DimensionMismatch,
    UnknownFunction,
    UnknownMethod,
    UnknownLineSearch,
    DuplicateName,
    InvalidConfig,
    LineSearchFailure,
    NotDescentDirection,
    RoundingStall,
    SingularMatrix,
    NonPositiveCurvature,
    EmptyWindow,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Base exception for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Validation failure bound to a named configuration field.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(ErrorCode::InvalidConfig, field + ": " + message),
          field_(std::move(field)), detail_(message) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string field_;
    std::string detail_;
};

// ---------------------------------------------------------------------------
// Evaluation protocol
// ---------------------------------------------------------------------------

/// Which objects an evaluation must produce (the value/gradient/Hessian flags).
struct EvalRequest {
    bool value = false;
    bool gradient = false;
    bool hessian = false;

    bool any() const noexcept { return value || gradient || hessian; }

    static constexpr EvalRequest Value() { return {true, false, false}; }
    static constexpr EvalRequest Gradient() { return {false, true, false}; }
    static constexpr EvalRequest Hessian() { return {false, false, true}; }
    static constexpr EvalRequest ValueGradient() { return {true, true, false}; }
    static constexpr EvalRequest All() { return {true, true, true}; }
};

struct EvalResult {
    std::optional<double> value;
    std::optional<Vector> gradient;
    std::optional<Matrix> hessian;
};

struct EvalCounters {
    long nValue = 0;
    long nGradient = 0;
    long nHessian = 0;

    EvalCounters& operator+=(const EvalCounters& o) noexcept {
        nValue += o.nValue;
        nGradient += o.nGradient;
        nHessian += o.nHessian;
        return *this;
    }
    friend EvalCounters operator+(EvalCounters a, const EvalCounters& b) noexcept { return a += b; }
    friend bool operator==(const EvalCounters&, const EvalCounters&) = default;

    long total() const noexcept { return nValue + nGradient + nHessian; }
};

/// Derivative orders an objective implements. Value is always available.
struct DerivativeSupport {
    bool gradient = true;
    bool hessian = true;
};

/// Raw evaluator: must fill exactly the requested fields of the result.
using Evaluator = std::function<EvalResult(const Vector& x, const EvalRequest& req)>;

/// A named objective of fixed dimension. Immutable and cheap to copy; safe to
/// share between threads as long as the evaluator is.
class Objective {
public:
    Objective(std::string name, Index dimension, DerivativeSupport supports, Evaluator evaluator);

    const std::string& name() const noexcept { return *name_; }
    Index dimension() const noexcept { return dimension_; }
    DerivativeSupport supports() const noexcept { return supports_; }

    /// Uncounted raw call; prefer evaluate().
    EvalResult raw(const Vector& x, const EvalRequest& req) const { return (*evaluator_)(x, req); }

private:
    std::shared_ptr<const std::string> name_;
    Index dimension_;
    DerivativeSupport supports_;
    std::shared_ptr<const Evaluator> evaluator_;
};

/// Counted evaluation. Increments one counter per requested object, then
/// validates the result. Throws UnsupportedDerivative, DimensionMismatch, or
/// NonFiniteResult.
EvalResult evaluate(const Objective& f, const Vector& x, const EvalRequest& req, EvalCounters& counters);

double evaluate_value(const Objective& f, const Vector& x, EvalCounters& counters);

bool all_finite(const Vector& v) noexcept;

// ---------------------------------------------------------------------------
// Stopping rule and run reports
// ---------------------------------------------------------------------------

enum class TerminationReason {
    MaxIterations,
    GradientTolerance,
    WorkPrecision,
    LineSearchFailure,
    NumericalFailure,
};

std::string_view to_string(TerminationReason reason);
std::optional<TerminationReason> parse_termination_reason(std::string_view text);

struct StoppingCriteria {
    long maxIterNum = 10000;
    double epsilon = 1e-6;
    double workPrec = 1e-16;

    void validate() const;
};

/// Checks, in order: iteration budget, gradient tolerance, relative function
/// change. The last check is skipped when no previous value is supplied.
std::optional<TerminationReason> should_stop(long k, double gradient_norm, std::optional<double> f_prev,
                                             double f_curr, const StoppingCriteria& criteria);

struct IterationTrace {
    std::vector<double> functionValue;
    std::vector<double> gradientNorm;

    void push(double f, double gnorm) {
        functionValue.push_back(f);
        gradientNorm.push_back(gnorm);
    }
    std::size_t size() const noexcept { return functionValue.size(); }
};

struct SolveReport {
    double fmin = 0.0;
    Vector xmin;
    long iterations = 0;
    double cpuSeconds = 0.0;
    EvalCounters counters;
    IterationTrace trace;
    TerminationReason terminationReason = TerminationReason::NumericalFailure;
    std::string message;  // diagnostic for failure reasons; empty otherwise

    double final_gradient_norm() const { return trace.gradientNorm.empty() ? 0.0 : trace.gradientNorm.back(); }
    bool converged() const noexcept {
        return terminationReason == TerminationReason::GradientTolerance ||
               terminationReason == TerminationReason::WorkPrecision;
    }
};

}  // namespace optlab
