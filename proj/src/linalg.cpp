#include "optlab/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <limits>

namespace optlab {

Vector solve_symmetric(const Matrix& A, const Vector& b) {
    const Index n = A.rows();
    const double eps = std::numeric_limits<double>::epsilon();
    const double scale = A.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) throw Error(ErrorCode::SingularMatrix, "matrix is zero");

    Eigen::LDLT<Matrix> ldlt(A);
    if (ldlt.info() == Eigen::Success) {
        const Vector d = ldlt.vectorD();
        const double dmax = d.cwiseAbs().maxCoeff();
        const bool singular = (d.cwiseAbs().array() <= static_cast<double>(n) * eps * dmax).any();
        if (!singular) {
            Vector x = ldlt.solve(b);
            const double resid = (A * x - b).norm();
            if (all_finite(x) && resid <= 1e-8 * (scale * x.norm() + b.norm())) return x;
        }
    }

    Eigen::FullPivLU<Matrix> lu(A);
    lu.setThreshold(static_cast<double>(n) * eps);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularMatrix, "matrix is numerically singular");
    Vector x = lu.solve(b);
    if (!all_finite(x)) throw Error(ErrorCode::SingularMatrix, "matrix is numerically singular");
    return x;
}

bool is_positive_definite(const Matrix& A) {
    Eigen::LLT<Matrix> llt(A);
    return llt.info() == Eigen::Success;
}

}  // namespace optlab
