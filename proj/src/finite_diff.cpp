#include "optlab/finite_diff.hpp"

namespace optlab {

namespace {

void check_step(double h) {
    if (!(h > 0.0)) throw ConfigError("h", "finite-difference step must be positive");
}

}  // namespace

Vector finite_diff_gradient(const Objective& f, const Vector& x, double h, EvalCounters& counters) {
    check_step(h);
    Vector g(x.size());
    Vector xp = x;
    for (Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        xp[i] = xi + h;
        const double fp = evaluate_value(f, xp, counters);
        xp[i] = xi - h;
        const double fm = evaluate_value(f, xp, counters);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Vector finite_diff_gradient(const Objective& f, const Vector& x, double h) {
    EvalCounters scratch;
    return finite_diff_gradient(f, x, h, scratch);
}

Matrix finite_diff_hessian(const Objective& f, const Vector& x, double h, EvalCounters& counters) {
    check_step(h);
    const Index n = x.size();
    Matrix H(n, n);
    Vector xp = x;
    const double f0 = evaluate_value(f, x, counters);
    for (Index i = 0; i < n; ++i) {
        xp[i] = x[i] + h;
        const double fp = evaluate_value(f, xp, counters);
        xp[i] = x[i] - h;
        const double fm = evaluate_value(f, xp, counters);
        xp[i] = x[i];
        H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            auto at = [&](double si, double sj) {
                xp[i] = x[i] + si * h;
                xp[j] = x[j] + sj * h;
                const double v = evaluate_value(f, xp, counters);
                xp[i] = x[i];
                xp[j] = x[j];
                return v;
            };
            const double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
            H(i, j) = v;
            H(j, i) = v;
        }
    }
    return 0.5 * (H + H.transpose());
}

Matrix finite_diff_hessian(const Objective& f, const Vector& x, double h) {
    EvalCounters scratch;
    return finite_diff_hessian(f, x, h, scratch);
}

Objective with_finite_differences(const Objective& f, double h_gradient, double h_hessian) {
    check_step(h_gradient);
    check_step(h_hessian);
    const Objective base = f;
    Evaluator eval = [base, h_gradient, h_hessian](const Vector& x, const EvalRequest& req) {
        EvalResult r;
        EvalCounters scratch;
        if (req.value) r.value = evaluate_value(base, x, scratch);
        if (req.gradient) {
            r.gradient = base.supports().gradient ? *evaluate(base, x, EvalRequest::Gradient(), scratch).gradient
                                                  : finite_diff_gradient(base, x, h_gradient, scratch);
        }
        if (req.hessian) {
            r.hessian = base.supports().hessian ? *evaluate(base, x, EvalRequest::Hessian(), scratch).hessian
                                                : finite_diff_hessian(base, x, h_hessian, scratch);
        }
        return r;
    };
    return Objective(f.name(), f.dimension(), DerivativeSupport{true, true}, std::move(eval));
}

}  // namespace optlab
