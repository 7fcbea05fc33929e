#pragma once

#include "optlab/core.hpp"

#include <optional>

namespace optlab {

/// m(d) - f = g'd + d'Bd / 2.
double model_value(const Vector& g, const Matrix& B, const Vector& d);

/// Minimiser of the model along -g inside the ball of radius delta.
/// Throws Error(NonPositiveCurvature) when g'Bg <= 0.
Vector clipped_cauchy_point(const Vector& g, const Matrix& B, double delta);

/// Dogleg step for min m(d) s.t. |d| <= delta. `newtonPoint` replaces -B^{-1} g
/// when given (the SR1 variant passes -H g). Falls back to the clipped Cauchy
/// point if the path point models worse. Throws Error(NonPositiveCurvature).
Vector dogleg_step(const Vector& g, const Matrix& B, double delta,
                   const std::optional<Vector>& newtonPoint = std::nullopt);

}  // namespace optlab
