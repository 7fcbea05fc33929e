#pragma once

#include "optlab/core.hpp"

#include <cstddef>
#include <deque>

namespace optlab {

inline constexpr double kSr1SkipRatio = 1e-8;
inline constexpr double kCurvatureTolerance = 1e-12;

/// SR1 update of an inverse-Hessian approximation H. Skipped (returns false)
/// when |(s - Hy)'y| < 1e-8 |s - Hy| |y|. Called with (B, y, s) it updates a
/// direct Hessian approximation instead.
bool sr1_update(Matrix& H, const Vector& s, const Vector& y);

/// Skipped (returns false) when s'y <= 1e-12 |s| |y|.
bool dfp_update(Matrix& H, const Vector& s, const Vector& y);

/// Inverse BFGS: H' = (I - r s y') H (I - r y s') + r s s', r = 1/(y's).
/// Same skip rule as DFP.
bool bfgs_update(Matrix& H, const Vector& s, const Vector& y);

class LbfgsMemory {
public:
    explicit LbfgsMemory(std::size_t capacity = 10);

    /// Stores the pair if y's > 1e-12 |y| |s|, dropping the oldest beyond
    /// capacity. Returns whether it was stored.
    bool push(const Vector& s, const Vector& y);
    void clear();

    std::size_t size() const noexcept { return s_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    // Oldest first.
    const Vector& s(std::size_t i) const { return s_[i]; }
    const Vector& y(std::size_t i) const { return y_[i]; }
    double rho(std::size_t i) const { return rho_[i]; }

private:
    std::size_t capacity_;
    std::deque<Vector> s_, y_;
    std::deque<double> rho_;
};

/// -H g by the two-loop recursion, H0 = gamma I with gamma = s'y / y'y of the
/// newest pair (1 when empty).
Vector lbfgs_direction(const LbfgsMemory& mem, const Vector& g);

}  // namespace optlab
