#pragma once

#include "optlab/core.hpp"

namespace optlab {

/// Solves A x = b for symmetric A. Uses LDL^T with diagonal pivoting and falls
/// back to a full-pivot LU when the factorization is inaccurate (strongly
/// indefinite A). Throws Error(SingularMatrix) when A is numerically singular.
Vector solve_symmetric(const Matrix& A, const Vector& b);

/// True when the symmetric matrix admits a Cholesky factorization.
bool is_positive_definite(const Matrix& A);

}  // namespace optlab
