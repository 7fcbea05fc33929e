#include "optlab/trust_region.hpp"

#include "optlab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace optlab {

double model_value(const Vector& g, const Matrix& B, const Vector& d) {
    return g.dot(d) + 0.5 * d.dot(B * d);
}

namespace {

double curvature(const Vector& g, const Matrix& B) {
    const double gBg = g.dot(B * g);
    if (!(gBg > 0.0)) throw Error(ErrorCode::NonPositiveCurvature, "model has non-positive curvature along -g");
    return gBg;
}

}  // namespace

Vector clipped_cauchy_point(const Vector& g, const Matrix& B, double delta) {
    const Vector pc = -(g.squaredNorm() / curvature(g, B)) * g;
    const double n = pc.norm();
    return n <= delta ? pc : Vector((delta / n) * pc);
}

Vector dogleg_step(const Vector& g, const Matrix& B, double delta, const std::optional<Vector>& newtonPoint) {
    if (!(delta > 0.0)) throw ConfigError("delta", "trust radius must be positive");
    const Vector pc = -(g.squaredNorm() / curvature(g, B)) * g;
    const double pcNorm = pc.norm();
    const Vector clipped = pcNorm <= delta ? pc : Vector((delta / pcNorm) * pc);

    Vector pb;
    if (newtonPoint) {
        pb = *newtonPoint;
    } else {
        try {
            pb = solve_symmetric(B, -g);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularMatrix) throw;
            return clipped;
        }
    }
    if (!all_finite(pb)) return clipped;

    Vector d;
    if (pb.norm() <= delta) {
        d = pb;
    } else if (pcNorm >= delta) {
        d = clipped;
    } else {
        // |pc + tau (pb - pc)| = delta, tau in [0, 1].
        const Vector w = pb - pc;
        const double a = w.squaredNorm();
        const double b = 2.0 * pc.dot(w);
        const double c = pcNorm * pcNorm - delta * delta;
        const double disc = std::max(0.0, b * b - 4.0 * a * c);
        // c < 0, so the positive root is computed without cancellation this way.
        const double tau = (2.0 * -c) / (b + std::sqrt(disc));
        d = pc + std::clamp(tau, 0.0, 1.0) * w;
    }
    if (model_value(g, B, d) > model_value(g, B, clipped)) return clipped;
    return d;
}

}  // namespace optlab
