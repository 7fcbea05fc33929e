#include "optlab/quasi_newton.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace optlab {

namespace {

bool curvature_ok(const Vector& s, const Vector& y) {
    return s.dot(y) > kCurvatureTolerance * s.norm() * y.norm();
}

}  // namespace

bool sr1_update(Matrix& H, const Vector& s, const Vector& y) {
    const Vector v = s - H * y;
    const double vy = v.dot(y);
    if (vy == 0.0 || std::abs(vy) < kSr1SkipRatio * v.norm() * y.norm()) return false;
    H.noalias() += (v * v.transpose()) / vy;
    return true;
}

bool dfp_update(Matrix& H, const Vector& s, const Vector& y) {
    if (!curvature_ok(s, y)) return false;
    const Vector Hy = H * y;
    const double yHy = y.dot(Hy);
    if (!(yHy > 0.0)) return false;
    H.noalias() += (s * s.transpose()) / s.dot(y) - (Hy * Hy.transpose()) / yHy;
    return true;
}

bool bfgs_update(Matrix& H, const Vector& s, const Vector& y) {
    if (!curvature_ok(s, y)) return false;
    // Expanded form of (I - r s y') H (I - r y s') + r s s'.
    const double r = 1.0 / y.dot(s);
    const Vector Hy = H * y;
    const double yHy = y.dot(Hy);
    H.noalias() += (r * r * yHy + r) * (s * s.transpose()) - r * (s * Hy.transpose() + Hy * s.transpose());
    return true;
}

LbfgsMemory::LbfgsMemory(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

bool LbfgsMemory::push(const Vector& s, const Vector& y) {
    const double ys = y.dot(s);
    if (!(ys > kCurvatureTolerance * y.norm() * s.norm())) return false;
    s_.push_back(s);
    y_.push_back(y);
    rho_.push_back(1.0 / ys);
    while (s_.size() > capacity_) {
        s_.pop_front();
        y_.pop_front();
        rho_.pop_front();
    }
    return true;
}

void LbfgsMemory::clear() {
    s_.clear();
    y_.clear();
    rho_.clear();
}

Vector lbfgs_direction(const LbfgsMemory& mem, const Vector& g) {
    const std::size_t m = mem.size();
    Vector q = g;
    std::vector<double> alpha(m);
    for (std::size_t i = m; i-- > 0;) {
        alpha[i] = mem.rho(i) * mem.s(i).dot(q);
        q -= alpha[i] * mem.y(i);
    }
    double gamma = 1.0;
    if (m > 0) gamma = mem.s(m - 1).dot(mem.y(m - 1)) / mem.y(m - 1).squaredNorm();
    Vector r = gamma * q;
    for (std::size_t i = 0; i < m; ++i) {
        const double b = mem.rho(i) * mem.y(i).dot(r);
        r += (alpha[i] - b) * mem.s(i);
    }
    return -r;
}

}  // namespace optlab
