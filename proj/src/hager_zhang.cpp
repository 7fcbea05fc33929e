// Approximate-Wolfe line search in the style of CG_DESCENT: bracket, then
// secant^2 steps with bisection whenever the interval fails to shrink.

#include "optlab/linesearch.hpp"

#include "line_search_detail.hpp"

#include <cmath>
#include <optional>
#include <utility>

namespace optlab {

namespace {

using detail::Phi;
using detail::Trial;

constexpr double kTheta = 0.5;    // bisection weight in the update step
constexpr double kGamma = 0.66;   // required interval shrink per secant^2 step
constexpr double kExpand = 5.0;   // bracket growth factor
constexpr double kEpsilon = 1e-6; // eps_k = kEpsilon * |f0|
constexpr int kMaxSecant = 50;
constexpr int kMaxUpdateTrials = 60;

class HagerZhang {
public:
    HagerZhang(Phi& phi, const LineSearchConfig& cfg)
        : phi_(phi), rho_(cfg.rho), sigma_(cfg.sigma), fcap_(phi.f0() + kEpsilon * std::abs(phi.f0())) {}

    std::optional<Trial> found;

    Trial eval(double t) {
        Trial tr = phi_.value_grad(t);
        if (!found && acceptable(tr)) found = tr;
        return tr;
    }

    bool acceptable(const Trial& tr) const {
        if (!tr.finite) return false;
        const double d0 = phi_.dphi0();
        const bool lower = tr.dphi >= sigma_ * d0;
        if (!lower) return false;
        if (phi_.armijo(tr, rho_)) return true;
        return (2.0 * rho_ - 1.0) * d0 >= tr.dphi && tr.f <= fcap_;
    }

    // Lower end of a bracket: negative slope and value not above f0 + eps.
    bool low_side(const Trial& tr) const { return tr.finite && tr.dphi < 0.0 && tr.f <= fcap_; }

    std::pair<Trial, Trial> u3(Trial a, Trial b) {
        for (int i = 0; i < kMaxUpdateTrials && !found; ++i) {
            Trial d = eval((1.0 - kTheta) * a.t + kTheta * b.t);
            if (found) break;
            if (d.finite && d.dphi >= 0.0) return {std::move(a), std::move(d)};
            if (low_side(d)) {
                a = std::move(d);
            } else {
                b = std::move(d);
            }
        }
        return {std::move(a), std::move(b)};
    }

    std::pair<Trial, Trial> update(Trial a, Trial b, double c) {
        const double lo = std::min(a.t, b.t), hi = std::max(a.t, b.t);
        if (!(c > lo && c < hi)) return {std::move(a), std::move(b)};
        Trial tc = eval(c);
        if (found) return {std::move(a), std::move(b)};
        if (tc.finite && tc.dphi >= 0.0) return {std::move(a), std::move(tc)};
        if (low_side(tc)) return {std::move(tc), std::move(b)};
        return u3(std::move(a), std::move(tc));
    }

    static double secant(const Trial& a, const Trial& b) {
        return (a.t * b.dphi - b.t * a.dphi) / (b.dphi - a.dphi);
    }

    std::pair<Trial, Trial> secant2(Trial a, Trial b) {
        const double c = secant(a, b);
        auto [A, B] = update(a, b, c);
        if (found) return {std::move(A), std::move(B)};
        std::optional<double> c2;
        if (c == B.t) c2 = secant(b, B);
        if (c == A.t) c2 = secant(a, A);
        if (c2) return update(std::move(A), std::move(B), *c2);
        return {std::move(A), std::move(B)};
    }

    double fcap() const { return fcap_; }

private:
    Phi& phi_;
    double rho_, sigma_, fcap_;
};

}  // namespace

LineSearchOutcome approx_wolfe(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg) {
    cfg.validate();
    Phi phi(f, p);
    detail::require_descent(phi.dphi0());
    HagerZhang hz(phi, cfg);

    Trial zero;
    zero.t = 0.0;
    zero.f = phi.f0();
    zero.dphi = phi.dphi0();
    zero.finite = true;

    // Bracket phase.
    Trial a = zero, b;
    double c = detail::initial_step(p, cfg);
    bool bracketed = false;
    while (!bracketed) {
        Trial tc = hz.eval(c);
        if (hz.found) return phi.accept(std::move(*hz.found));
        if (tc.finite && tc.dphi >= 0.0) {
            b = std::move(tc);
            bracketed = true;
        } else if (!hz.low_side(tc)) {
            auto ab = hz.u3(a, std::move(tc));
            if (hz.found) return phi.accept(std::move(*hz.found));
            a = std::move(ab.first);
            b = std::move(ab.second);
            bracketed = true;
        } else {
            a = std::move(tc);
            c *= kExpand;
            if (c > detail::kMaxBracketStep) phi.fail("approximate wolfe: no bracket found");
        }
    }

    for (int k = 0; k < kMaxSecant; ++k) {
        const double width = std::abs(b.t - a.t);
        auto ab = hz.secant2(a, b);
        if (hz.found) return phi.accept(std::move(*hz.found));
        a = std::move(ab.first);
        b = std::move(ab.second);
        if (std::abs(b.t - a.t) > kGamma * width) {
            ab = hz.update(a, b, 0.5 * (a.t + b.t));
            if (hz.found) return phi.accept(std::move(*hz.found));
            a = std::move(ab.first);
            b = std::move(ab.second);
        }
        if (std::abs(b.t - a.t) <= 1e-16 * std::max(1.0, std::abs(b.t))) break;
    }
    phi.fail("approximate wolfe: secant steps exhausted");
}

}  // namespace optlab
