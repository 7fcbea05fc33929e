#pragma once

#include "optlab/core.hpp"

namespace optlab {

/// Central-difference gradient, (f(x+h e_i) - f(x-h e_i)) / 2h per coordinate.
/// Uses value evaluations only; counters are incremented accordingly.
Vector finite_diff_gradient(const Objective& f, const Vector& x, double h, EvalCounters& counters);
Vector finite_diff_gradient(const Objective& f, const Vector& x, double h);

/// Central second differences, symmetrised as (H + H^T) / 2.
Matrix finite_diff_hessian(const Objective& f, const Vector& x, double h, EvalCounters& counters);
Matrix finite_diff_hessian(const Objective& f, const Vector& x, double h);

/// Wraps a value-only evaluator so that gradient/Hessian requests are served by
/// central differences. Useful for user functions without analytic derivatives.
Objective with_finite_differences(const Objective& f, double h_gradient = 1e-6, double h_hessian = 1e-4);

}  // namespace optlab
