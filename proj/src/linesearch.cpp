#include "optlab/linesearch.hpp"

#include "line_search_detail.hpp"

#include <algorithm>
#include <cmath>

namespace optlab {

using detail::Phi;
using detail::Trial;

HistoryWindow::HistoryWindow(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

void HistoryWindow::push(double f) {
    values_.push_front(f);
    while (values_.size() > capacity_) values_.pop_back();
}

double HistoryWindow::reference_value() const {
    if (values_.empty()) throw Error(ErrorCode::EmptyWindow, "history window is empty");
    return *std::max_element(values_.begin(), values_.end());
}

void HistoryWindow::clear() {
    values_.clear();
    step.reset();
    previousValue.reset();
}

namespace detail {

double quadratic_minimizer(double a, double fa, double ga, double b, double fb) {
    const double w = b - a;
    return a - ga * w * w / (2.0 * (fb - fa - ga * w));
}

std::optional<double> cubic_minimizer(double a, double fa, double ga, double b, double fb, double gb) {
    const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - ga * gb;
    if (!(disc >= 0.0)) return std::nullopt;
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = gb - ga + 2.0 * d2;
    if (denom == 0.0) return std::nullopt;
    const double t = b - (b - a) * ((gb + d2 - d1) / denom);
    if (!std::isfinite(t)) return std::nullopt;
    return t;
}

namespace {

// Minimiser of the cubic through phi(0), phi'(0), phi(t0), phi(t1).
std::optional<double> cubic_from_values(double f0, double g0, double t0, double f_t0, double t1, double f_t1) {
    const double c1 = f_t1 - f0 - g0 * t1;
    const double c0 = f_t0 - f0 - g0 * t0;
    const double denom = t0 * t0 * t1 * t1 * (t1 - t0);
    if (denom == 0.0) return std::nullopt;
    const double a = (t0 * t0 * c1 - t1 * t1 * c0) / denom;
    const double b = (-t0 * t0 * t0 * c1 + t1 * t1 * t1 * c0) / denom;
    double t;
    if (std::abs(a) < 1e-300) {
        if (b == 0.0) return std::nullopt;
        t = -g0 / (2.0 * b);
    } else {
        const double disc = b * b - 3.0 * a * g0;
        if (disc < 0.0) return std::nullopt;
        t = (-b + std::sqrt(disc)) / (3.0 * a);
    }
    if (!std::isfinite(t)) return std::nullopt;
    return t;
}

}  // namespace
}  // namespace detail

LineSearchOutcome fixed_step(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg) {
    cfg.validate();
    Phi phi(f, p);
    Trial tr = phi.value_grad(detail::initial_step(p, cfg));
    if (!tr.finite) throw Error(ErrorCode::NonFiniteResult, "fixed step produced a non-finite value");
    return phi.accept(std::move(tr));
}

namespace {

constexpr double kShrink = 0.5;  // c1
constexpr double kGrow = 1.2;    // c2

// Shrinks t by c1 until phi(t) < phi(0). Returns the decreasing trial.
Trial shrink_until_decrease(Phi& phi, double& t, Trial tr) {
    while (!(tr.f < phi.f0())) {
        t *= kShrink;
        if (t < detail::kStepFloor) phi.fail("step underflow: no decrease along the direction");
        tr = phi.value(t);
    }
    return tr;
}

}  // namespace

LineSearchOutcome corr_prev_iter(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg,
                                 HistoryWindow& window) {
    cfg.validate();
    Phi phi(f, p);
    double t = window.step.value_or(detail::initial_step(p, cfg));
    Trial tr = shrink_until_decrease(phi, t, phi.value(t));
    window.step = t;
    window.previousValue = p.f0;
    return phi.accept(std::move(tr));
}

LineSearchOutcome corr_prev_two_iter(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg,
                                     HistoryWindow& window) {
    cfg.validate();
    Phi phi(f, p);
    double t = window.step.value_or(detail::initial_step(p, cfg));
    Trial tr = phi.value(t);
    const double fk = p.f0;
    double next = t;
    if (tr.f < fk && window.previousValue && fk < *window.previousValue) {
        next = t * kGrow;
    } else if (!(tr.f < fk)) {
        tr = shrink_until_decrease(phi, t, std::move(tr));
        next = t;
    }
    window.step = next;
    window.previousValue = fk;
    return phi.accept(std::move(tr));
}

LineSearchOutcome backtracking(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg) {
    cfg.validate();
    Phi phi(f, p);
    detail::require_descent(phi.dphi0());
    double t = detail::initial_step(p, cfg);
    for (int l = 0; l <= detail::kMaxBacktracks; ++l) {
        Trial tr = phi.value(t);
        if (phi.armijo(tr, cfg.rho)) return phi.accept(std::move(tr));
        t *= cfg.beta;
    }
    phi.fail("backtracking: sufficient decrease not reached");
}

LineSearchOutcome armijo_interp(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg) {
    cfg.validate();
    Phi phi(f, p);
    detail::require_descent(phi.dphi0());
    double t = detail::initial_step(p, cfg);
    Trial tr = phi.value(t);
    std::optional<Trial> prev;
    for (int it = 0; it <= detail::kMaxBacktracks; ++it) {
        if (phi.armijo(tr, cfg.rho)) return phi.accept(std::move(tr));
        std::optional<double> next;
        if (!tr.finite) {
            next = 0.1 * t;
        } else if (!prev || !prev->finite) {
            next = detail::quadratic_minimizer(0.0, phi.f0(), phi.dphi0(), t, tr.f);
        } else {
            next = detail::cubic_from_values(phi.f0(), phi.dphi0(), prev->t, prev->f, t, tr.f);
        }
        double nt = (next && std::isfinite(*next)) ? *next : 0.5 * t;
        nt = std::clamp(nt, 0.1 * t, 0.5 * t);
        if (nt < detail::kStepFloor) break;
        prev = std::move(tr);
        t = nt;
        tr = phi.value(t);
    }
    phi.fail("armijo: sufficient decrease not reached");
}

LineSearchOutcome goldstein(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg) {
    cfg.validate();
    Phi phi(f, p);
    detail::require_descent(phi.dphi0());
    const double rho = cfg.rho;
    const auto upper = [&](const Trial& tr) { return phi.armijo(tr, rho); };
    const auto lower = [&](const Trial& tr) { return tr.f >= phi.f0() + (1.0 - rho) * tr.t * phi.dphi0(); };

    double lo = 0.0, hi = 0.0;
    double t = detail::initial_step(p, cfg);
    while (true) {
        Trial tr = phi.value(t);
        const bool up = upper(tr);
        if (up && lower(tr)) return phi.accept(std::move(tr));
        if (!up) {
            hi = t;
            break;
        }
        lo = t;
        t *= 2.0;
        if (t > detail::kMaxBracketStep) phi.fail("goldstein: no upper bracket found");
    }
    for (int i = 0; i < detail::kMaxBisections; ++i) {
        t = 0.5 * (lo + hi);
        Trial tr = phi.value(t);
        const bool up = upper(tr);
        if (up && lower(tr)) return phi.accept(std::move(tr));
        if (!up) {
            hi = t;
        } else {
            lo = t;
        }
    }
    phi.fail("goldstein: bisection did not converge");
}

namespace {

double zoom_trial(const Trial& lo, const Trial& hi) {
    const double a = std::min(lo.t, hi.t), b = std::max(lo.t, hi.t);
    const double w = b - a;
    double t = 0.5 * (a + b);
    if (lo.finite && hi.finite && std::isfinite(lo.dphi) && std::isfinite(hi.dphi)) {
        if (auto c = detail::cubic_minimizer(lo.t, lo.f, lo.dphi, hi.t, hi.f, hi.dphi)) t = *c;
    }
    if (!(t >= a + 0.1 * w && t <= b - 0.1 * w)) t = 0.5 * (a + b);
    return t;
}

}  // namespace

LineSearchOutcome wolfe(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg, bool strong) {
    cfg.validate();
    Phi phi(f, p);
    detail::require_descent(phi.dphi0());
    const double rho = cfg.rho, sigma = cfg.sigma;
    const auto curvature = [&](const Trial& tr) {
        return strong ? std::abs(tr.dphi) <= sigma * std::abs(phi.dphi0()) : tr.dphi >= sigma * phi.dphi0();
    };

    auto zoom = [&](Trial lo, Trial hi) -> LineSearchOutcome {
        for (int j = 0; j < detail::kMaxZoom; ++j) {
            const double t = zoom_trial(lo, hi);
            Trial tr = phi.value_grad(t);
            if (!tr.finite || !phi.armijo(tr, rho) || tr.f >= lo.f) {
                hi = std::move(tr);
            } else {
                if (curvature(tr)) return phi.accept(std::move(tr));
                if (tr.dphi * (hi.t - lo.t) >= 0.0) hi = lo;
                lo = std::move(tr);
            }
        }
        phi.fail(strong ? "strong wolfe: zoom did not converge" : "wolfe: zoom did not converge");
    };

    Trial prev;
    prev.t = 0.0;
    prev.f = phi.f0();
    prev.dphi = phi.dphi0();
    prev.finite = true;

    double t = detail::initial_step(p, cfg);
    for (int i = 0;; ++i) {
        Trial tr = phi.value_grad(t);
        if (!tr.finite || !phi.armijo(tr, rho) || (i > 0 && tr.f >= prev.f)) return zoom(std::move(prev), std::move(tr));
        if (curvature(tr)) return phi.accept(std::move(tr));
        if (tr.dphi >= 0.0) return zoom(std::move(tr), std::move(prev));
        prev = std::move(tr);
        t *= 2.0;
        if (t > detail::kMaxBracketStep) phi.fail("wolfe: bracket expansion exceeded maximum step");
    }
}

LineSearchOutcome non_monotone(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg,
                               const HistoryWindow& window) {
    cfg.validate();
    Phi phi(f, p);
    detail::require_descent(phi.dphi0());
    const double ref = window.values().empty() ? p.f0 : window.reference_value();
    double t = detail::initial_step(p, cfg);
    for (int l = 0; l <= detail::kMaxBacktracks; ++l) {
        Trial tr = phi.value(t);
        if (tr.f <= ref + cfg.rho * t * phi.dphi0()) return phi.accept(std::move(tr));
        t *= cfg.beta;
    }
    phi.fail("nonmonotone: acceptance condition not reached");
}

RuleLineSearch::RuleLineSearch(LineSearchConfig cfg)
    : cfg_(cfg), window_(static_cast<std::size_t>(std::max<long>(cfg.bigM, 1))) {
    cfg_.validate();
}

LineSearchOutcome RuleLineSearch::search(const Objective& f, const LineSearchProblem& p) {
    switch (cfg_.rule) {
        case LineSearchRule::FixedStep: return fixed_step(f, p, cfg_);
        case LineSearchRule::CorrPrevIter: return corr_prev_iter(f, p, cfg_, window_);
        case LineSearchRule::CorrPrevTwoIter: return corr_prev_two_iter(f, p, cfg_, window_);
        case LineSearchRule::Backtracking: return backtracking(f, p, cfg_);
        case LineSearchRule::Armijo: return armijo_interp(f, p, cfg_);
        case LineSearchRule::Goldstein: return goldstein(f, p, cfg_);
        case LineSearchRule::Wolfe: return wolfe(f, p, cfg_, false);
        case LineSearchRule::StrongWolfe: return wolfe(f, p, cfg_, true);
        case LineSearchRule::ApproxWolfe: return approx_wolfe(f, p, cfg_);
        case LineSearchRule::MoreThuente: return more_thuente(f, p, cfg_);
        case LineSearchRule::NonMonotone:
            window_.push(p.f0);
            return non_monotone(f, p, cfg_, window_);
    }
    throw Error(ErrorCode::UnknownLineSearch, "unhandled line-search rule");
}

std::unique_ptr<LineSearch> make_line_search(const LineSearchConfig& cfg) {
    return std::make_unique<RuleLineSearch>(cfg);
}

}  // namespace optlab
