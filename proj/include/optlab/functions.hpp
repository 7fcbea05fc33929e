#pragma once

#include "optlab/core.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace optlab {

enum class HessianStructure {
    Diagonal,
    BlockDiagonal,  // extended form: independent blocks of `bandwidth` coordinates
    Banded,         // generalized form: |i - j| <= bandwidth
    Dense,
};

std::string_view to_string(HessianStructure s);

/// Rule mapping a dimension to a starting point.
struct StartingPointRule {
    std::string id;
    std::function<Vector(Index)> generator;
    /// Whether generator(n) is a prefix of generator(m) for admissible n < m.
    bool prefixStable = true;

    Vector operator()(Index n) const { return generator(n); }
};

namespace rules {
/// Repeats `pattern` cyclically: (p0, p1, ..., p0, p1, ...).
StartingPointRule repeat(std::vector<double> pattern);
StartingPointRule constant(double c);
/// x_i = offset + scale * i with i = 1..n.
StartingPointRule indexed(double offset, double scale);
/// x_i = 1/n.
StartingPointRule inverse_dimension();
}  // namespace rules

struct FunctionSpec {
    std::string name;
    Index minDimension = 1;
    Index multipleOf = 1;  // dimension constraint: n % multipleOf == 0
    DerivativeSupport supports;
    HessianStructure structure = HessianStructure::Dense;
    Index bandwidth = 0;
    StartingPointRule startingPoint;
    std::optional<double> knownMinimum;  // f* where it does not depend on n
    std::string formula;

    bool admits(Index n) const noexcept { return n >= minDimension && n % multipleOf == 0; }
    /// "any", "even", or "multiple of k".
    std::string dimension_constraint() const;
    /// Smallest admissible dimension >= n.
    Index admissible_at_least(Index n) const;
};

/// Dimension-generic evaluator; the dimension is x.size().
using FamilyEvaluator = std::function<EvalResult(const Vector& x, const EvalRequest& req)>;

/// Registered functions, sorted by name. Includes the built-in collection.
std::vector<FunctionSpec> catalog();

/// Throws Error(UnknownFunction).
FunctionSpec function_spec(std::string_view name);

/// Adds a function to the global registry. Throws Error(DuplicateName).
/// Value support is implicit; the evaluator must honour the gradient/hessian flags.
void register_function(FunctionSpec spec, FamilyEvaluator evaluator);

/// Bound objective of dimension n. Throws UnknownFunction / DimensionMismatch.
Objective make_objective(std::string_view name, Index n);

/// Throws UnknownFunction / DimensionMismatch.
Vector starting_point(std::string_view name, Index n);

/// Uncounted evaluation by name.
EvalResult evaluate_catalog_function(std::string_view name, const Vector& x, const EvalRequest& req);

/// Default dimension for the function: 100 for first-order methods, 10 for
/// methods that need the Hessian, rounded up to an admissible value.
Index default_dimension(const FunctionSpec& spec, bool second_order);

}  // namespace optlab
