#pragma once

// Independent oracles shared by the test binaries. Nothing here calls into the
// code under test except the Objective wrapper and evaluate().

#include "optlab/core.hpp"
#include "optlab/functions.hpp"
#include "optlab/linesearch.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using optlab::EvalCounters;
using optlab::EvalRequest;
using optlab::EvalResult;
using optlab::Index;
using optlab::Matrix;
using optlab::Objective;
using optlab::Vector;

// f(x) = x'Ax/2 - b'x
inline Objective quadratic(const Matrix& A, const Vector& b, std::string name = "quad") {
    return Objective(std::move(name), A.rows(), {true, true}, [A, b](const Vector& x, const EvalRequest& r) {
        EvalResult out;
        if (r.value) out.value = 0.5 * x.dot(A * x) - b.dot(x);
        if (r.gradient) out.gradient = A * x - b;
        if (r.hessian) out.hessian = A;
        return out;
    });
}

inline Objective quadratic(const Matrix& A) { return quadratic(A, Vector::Zero(A.rows())); }

inline Vector random_vector(std::mt19937_64& rng, Index n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

// Q diag(lambda) Q' with eigenvalues spread log-uniformly in [1, cond].
inline Matrix random_spd(std::mt19937_64& rng, Index n, double cond = 100.0) {
    Matrix M(n, n);
    std::normal_distribution<double> z;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) M(i, j) = z(rng);
    const Matrix Q = Eigen::HouseholderQR<Matrix>(M).householderQ();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector lam(n);
    for (Index i = 0; i < n; ++i) lam(i) = std::pow(cond, u(rng));
    const Matrix A = Q * lam.asDiagonal() * Q.transpose();
    return 0.5 * (A + A.transpose());
}

// Counts raw calls per requested object, independent of the library's counters.
struct Shim {
    std::shared_ptr<EvalCounters> seen = std::make_shared<EvalCounters>();
    Objective f;

    explicit Shim(const Objective& inner)
        : f(inner.name(), inner.dimension(), inner.supports(),
            [c = seen, inner](const Vector& x, const EvalRequest& r) {
                if (r.value) ++c->nValue;
                if (r.gradient) ++c->nGradient;
                if (r.hessian) ++c->nHessian;
                return inner.raw(x, r);
            }) {}
};

// Exact minimiser along d of a quadratic with Hessian A.
class ExactQuadraticSearch final : public optlab::LineSearch {
public:
    explicit ExactQuadraticSearch(Matrix A) : A_(std::move(A)) {}

    optlab::LineSearchOutcome search(const Objective& f, const optlab::LineSearchProblem& p) override {
        optlab::LineSearchOutcome out;
        out.t = -p.g0.dot(p.d) / p.d.dot(A_ * p.d);
        out.xNew = p.x + out.t * p.d;
        EvalResult r = optlab::evaluate(f, out.xNew, EvalRequest::ValueGradient(), out.counters);
        out.fNew = *r.value;
        out.gNew = *r.gradient;
        return out;
    }

private:
    Matrix A_;
};

// phi(t) and phi'(t), recomputed from scratch.
struct Phi {
    double f, slope;
};

inline Phi phi_at(const Objective& f, const Vector& x, const Vector& d, double t) {
    const EvalResult r = f.raw(x + t * d, EvalRequest::ValueGradient());
    return {*r.value, r.gradient->dot(d)};
}

// Acceptance conditions, written out directly.
inline bool armijo(double f0, double dphi0, double t, double ft, double rho) { return ft <= f0 + rho * t * dphi0; }

inline bool goldstein(double f0, double dphi0, double t, double ft, double rho) {
    return armijo(f0, dphi0, t, ft, rho) && ft >= f0 + (1.0 - rho) * t * dphi0;
}

inline bool wolfe(double f0, double dphi0, double t, Phi pt, double rho, double sigma) {
    return armijo(f0, dphi0, t, pt.f, rho) && pt.slope >= sigma * dphi0;
}

inline bool strong_wolfe(double f0, double dphi0, double t, Phi pt, double rho, double sigma) {
    return armijo(f0, dphi0, t, pt.f, rho) && std::abs(pt.slope) <= sigma * std::abs(dphi0);
}

// Standard Wolfe pair or the approximate pair (2rho-1)phi'(0) >= phi'(t) >= sigma phi'(0).
inline bool approx_wolfe(double f0, double dphi0, double t, Phi pt, double rho, double sigma) {
    const bool approx = (2.0 * rho - 1.0) * dphi0 >= pt.slope && pt.slope >= sigma * dphi0;
    return wolfe(f0, dphi0, t, pt, rho, sigma) || approx;
}

inline bool non_monotone(double ref, double dphi0, double t, double ft, double rho) {
    return ft <= ref + rho * t * dphi0;
}

// Extended Rosenbrock written independently of the catalog.
inline double rosenbrock(const Vector& x) {
    double s = 0.0;
    for (Index i = 0; i + 1 < x.size(); i += 2) {
        const double a = x(i + 1) - x(i) * x(i), b = 1.0 - x(i);
        s += 100.0 * a * a + b * b;
    }
    return s;
}

// Dense inverse BFGS recursion from H0, used against the two-loop recursion.
inline Matrix dense_bfgs(Matrix H, const std::vector<Vector>& s, const std::vector<Vector>& y) {
    const Index n = H.rows();
    const Matrix I = Matrix::Identity(n, n);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = 1.0 / y[i].dot(s[i]);
        H = (I - r * s[i] * y[i].transpose()) * H * (I - r * y[i] * s[i].transpose()) + r * s[i] * s[i].transpose();
    }
    return H;
}

inline double model(const Vector& g, const Matrix& B, const Vector& d) { return g.dot(d) + 0.5 * d.dot(B * d); }

// Best model value on the dogleg path inside the ball. The path norm grows with
// tau, so the feasible part is [0, tauMax]; it is sampled at `samples` points.
inline double brute_force_dogleg(const Vector& g, const Matrix& B, double delta, int samples = 10000) {
    const Vector pc = -(g.squaredNorm() / g.dot(B * g)) * g;
    const Vector pb = -B.ldlt().solve(g);
    auto path = [&](double tau) -> Vector { return tau <= 1.0 ? Vector(tau * pc) : Vector(pc + (tau - 1.0) * (pb - pc)); };
    double tauMax = 2.0;
    if (path(2.0).norm() > delta) {
        double lo = 0.0, hi = 2.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (path(mid).norm() <= delta ? lo : hi) = mid;
        }
        tauMax = lo;
    }
    double best = 0.0;
    for (int i = 0; i <= samples; ++i) best = std::min(best, model(g, B, path(tauMax * i / samples)));
    return best;
}

// One randomized step-size problem: a random SPD quadratic or an extended
// Rosenbrock at a random point, with a descent direction that is either -g or
// a random vector flipped into the descent half-space.
struct LsInstance {
    Objective f;
    Vector x, d, g0;
    double f0 = 0.0;
};

inline LsInstance random_instance(std::mt19937_64& rng, int k) {
    std::uniform_int_distribution<int> dim(1, 4);
    const Index n = 2 * dim(rng);
    Objective f = (k % 2 == 0) ? quadratic(random_spd(rng, n, 1e3), random_vector(rng, n))
                               : optlab::make_objective("ExtRosenbrock", n);
    LsInstance in{f, random_vector(rng, n, -2.0, 2.0), {}, {}, 0.0};
    const EvalResult r = f.raw(in.x, EvalRequest::ValueGradient());
    in.f0 = *r.value;
    in.g0 = *r.gradient;
    if ((k / 2) % 2 == 0) {
        in.d = -in.g0;
    } else {
        in.d = random_vector(rng, n);
        if (in.d.dot(in.g0) > 0.0) in.d = -in.d;
        if (in.d.dot(in.g0) == 0.0) in.d = -in.g0;
    }
    return in;
}

// Re-verifies an accepted step against the rule's defining inequality,
// evaluating phi from scratch. `ref` is the nonmonotone reference value.
inline bool accepted_step_valid(const optlab::LineSearchConfig& c, const LsInstance& in, double t, double ref) {
    using optlab::LineSearchRule;
    const double dphi0 = in.g0.dot(in.d);
    const Phi pt = phi_at(in.f, in.x, in.d, t);
    if (!(t > 0.0) || !std::isfinite(pt.f)) return false;
    switch (c.rule) {
        case LineSearchRule::FixedStep: return t == c.tInit;
        case LineSearchRule::CorrPrevIter:
        case LineSearchRule::CorrPrevTwoIter: return pt.f < in.f0;
        case LineSearchRule::Backtracking:
        case LineSearchRule::Armijo: return armijo(in.f0, dphi0, t, pt.f, c.rho);
        case LineSearchRule::Goldstein: return goldstein(in.f0, dphi0, t, pt.f, c.rho);
        case LineSearchRule::Wolfe: return wolfe(in.f0, dphi0, t, pt, c.rho, c.sigma);
        case LineSearchRule::StrongWolfe:
        case LineSearchRule::MoreThuente: return strong_wolfe(in.f0, dphi0, t, pt, c.rho, c.sigma);
        case LineSearchRule::ApproxWolfe: return approx_wolfe(in.f0, dphi0, t, pt, c.rho, c.sigma);
        case LineSearchRule::NonMonotone: return non_monotone(ref, dphi0, t, pt.f, c.rho);
    }
    return false;
}

// Rule parameters drawn inside each rule's admissible region.
inline optlab::LineSearchConfig random_config(std::mt19937_64& rng, optlab::LineSearchRule rule) {
    using optlab::LineSearchRule;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    optlab::LineSearchConfig c = optlab::default_line_search_config(rule);
    c.tInit = std::pow(10.0, -1.0 + 2.0 * u(rng));
    c.beta = 0.1 + 0.4 * u(rng);
    c.bigM = 1 + static_cast<long>(u(rng) * 10);
    switch (rule) {
        case LineSearchRule::Goldstein: c.rho = 0.01 + 0.45 * u(rng); break;
        case LineSearchRule::ApproxWolfe:
            c.rho = 0.01 + 0.3 * u(rng);
            c.sigma = c.rho + 0.05 + (0.94 - c.rho) * u(rng);
            break;
        case LineSearchRule::Wolfe:
        case LineSearchRule::StrongWolfe:
        case LineSearchRule::MoreThuente:
            c.rho = std::pow(10.0, -4.0 + 3.0 * u(rng));
            c.sigma = std::max(c.rho + 0.05, 0.1 + 0.85 * u(rng));
            break;
        default: c.rho = std::pow(10.0, -4.0 + 3.5 * u(rng)); break;
    }
    c.validate();
    return c;
}

}  // namespace oracle
