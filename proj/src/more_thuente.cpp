// Port of the MINPACK-2 dcsrch/dcstep pair.

#include "optlab/linesearch.hpp"

#include "line_search_detail.hpp"

#include <algorithm>
#include <cmath>

namespace optlab {

namespace {

using detail::Phi;
using detail::Trial;

constexpr double kStpMin = 1e-20;
constexpr double kStpMax = 1e20;
constexpr double kXtol = 1e-10;
constexpr int kMaxTrials = 50;
constexpr double kXtrapLower = 1.1;
constexpr double kXtrapUpper = 4.0;

// Safeguarded step for the interval [stx, sty] given a new trial (stp, fp, dp).
void dcstep(double& stx, double& fx, double& dx, double& sty, double& fy, double& dy, double& stp, double fp,
            double dp, bool& brackt, double stpmin, double stpmax) {
    const double sgnd = dp * (dx / std::abs(dx));
    double stpf;

    if (fp > fx) {
        const double theta = 3.0 * (fx - fp) / (stp - stx) + dx + dp;
        const double s = std::max({std::abs(theta), std::abs(dx), std::abs(dp)});
        double gamma = s * std::sqrt(std::max(0.0, (theta / s) * (theta / s) - (dx / s) * (dp / s)));
        if (stp < stx) gamma = -gamma;
        const double p = (gamma - dx) + theta;
        const double q = ((gamma - dx) + gamma) + dp;
        const double r = p / q;
        const double stpc = stx + r * (stp - stx);
        const double stpq = stx + ((dx / ((fx - fp) / (stp - stx) + dx)) / 2.0) * (stp - stx);
        if (std::abs(stpc - stx) < std::abs(stpq - stx)) {
            stpf = stpc;
        } else {
            stpf = stpc + (stpq - stpc) / 2.0;
        }
        brackt = true;
    } else if (sgnd < 0.0) {
        const double theta = 3.0 * (fx - fp) / (stp - stx) + dx + dp;
        const double s = std::max({std::abs(theta), std::abs(dx), std::abs(dp)});
        double gamma = s * std::sqrt(std::max(0.0, (theta / s) * (theta / s) - (dx / s) * (dp / s)));
        if (stp > stx) gamma = -gamma;
        const double p = (gamma - dp) + theta;
        const double q = ((gamma - dp) + gamma) + dx;
        const double r = p / q;
        const double stpc = stp + r * (stx - stp);
        const double stpq = stp + (dp / (dp - dx)) * (stx - stp);
        stpf = std::abs(stpc - stp) > std::abs(stpq - stp) ? stpc : stpq;
        brackt = true;
    } else if (std::abs(dp) < std::abs(dx)) {
        const double theta = 3.0 * (fx - fp) / (stp - stx) + dx + dp;
        const double s = std::max({std::abs(theta), std::abs(dx), std::abs(dp)});
        double gamma = s * std::sqrt(std::max(0.0, (theta / s) * (theta / s) - (dx / s) * (dp / s)));
        if (stp > stx) gamma = -gamma;
        const double p = (gamma - dp) + theta;
        const double q = (gamma + (dx - dp)) + gamma;
        const double r = p / q;
        double stpc;
        if (r < 0.0 && gamma != 0.0) {
            stpc = stp + r * (stx - stp);
        } else if (stp > stx) {
            stpc = stpmax;
        } else {
            stpc = stpmin;
        }
        const double stpq = stp + (dp / (dp - dx)) * (stx - stp);
        if (brackt) {
            stpf = std::abs(stpc - stp) < std::abs(stpq - stp) ? stpc : stpq;
            if (stp > stx) {
                stpf = std::min(stp + 0.66 * (sty - stp), stpf);
            } else {
                stpf = std::max(stp + 0.66 * (sty - stp), stpf);
            }
        } else {
            stpf = std::abs(stpc - stp) > std::abs(stpq - stp) ? stpc : stpq;
            stpf = std::clamp(stpf, stpmin, stpmax);
        }
    } else {
        if (brackt) {
            const double theta = 3.0 * (fp - fy) / (sty - stp) + dy + dp;
            const double s = std::max({std::abs(theta), std::abs(dy), std::abs(dp)});
            double gamma = s * std::sqrt(std::max(0.0, (theta / s) * (theta / s) - (dy / s) * (dp / s)));
            if (stp > sty) gamma = -gamma;
            const double p = (gamma - dp) + theta;
            const double q = ((gamma - dp) + gamma) + dy;
            const double r = p / q;
            stpf = stp + r * (sty - stp);
        } else {
            stpf = stp > stx ? stpmax : stpmin;
        }
    }

    if (fp > fx) {
        sty = stp;
        fy = fp;
        dy = dp;
    } else {
        if (sgnd < 0.0) {
            sty = stx;
            fy = fx;
            dy = dx;
        }
        stx = stp;
        fx = fp;
        dx = dp;
    }
    stp = stpf;
}

}  // namespace

LineSearchOutcome more_thuente(const Objective& f, const LineSearchProblem& p, const LineSearchConfig& cfg) {
    cfg.validate();
    Phi phi(f, p);
    detail::require_descent(phi.dphi0());
    double stp = detail::initial_step(p, cfg);
    if (stp < kStpMin || stp > kStpMax) throw ConfigError("tInit", "initial step outside [1e-20, 1e20]");

    const double finit = phi.f0();
    const double ginit = phi.dphi0();
    const double gtest = cfg.rho * ginit;
    const double gtol = cfg.sigma;

    bool brackt = false;
    int stage = 1;
    double width = kStpMax - kStpMin;
    double width1 = 2.0 * width;
    double stx = 0.0, fx = finit, gx = ginit;
    double sty = 0.0, fy = finit, gy = ginit;
    double stmin = 0.0;
    double stmax = stp + kXtrapUpper * stp;

    for (int trial = 0; trial < kMaxTrials; ++trial) {
        Trial tr = phi.value_grad(stp);
        if (!tr.finite) {
            // Back off toward the best point; the interval upper end shrinks with it.
            stmax = std::min(stmax, stp);
            stp = stx + 0.5 * (stp - stx);
            if (stp < kStpMin) phi.fail("more-thuente: step underflow after non-finite trials");
            continue;
        }
        const double fv = tr.f;
        const double g = tr.dphi;
        const bool armijo = phi.armijo(tr, cfg.rho);

        if (stage == 1 && armijo && g >= 0.0) stage = 2;

        if (armijo && std::abs(g) <= gtol * (-ginit)) return phi.accept(std::move(tr));

        if (brackt && (stp <= stmin || stp >= stmax))
            throw Error(ErrorCode::RoundingStall, "more-thuente: rounding errors prevent progress");
        if (brackt && stmax - stmin <= kXtol * stmax)
            throw Error(ErrorCode::RoundingStall, "more-thuente: interval width below tolerance");
        if (stp == kStpMax && armijo && g <= gtest) phi.fail("more-thuente: step reached the upper bound");
        if (stp == kStpMin && (!armijo || g >= gtest)) phi.fail("more-thuente: step reached the lower bound");

        if (stage == 1 && fv < fx && !armijo) {
            double fm = fv - stp * gtest;
            double fxm = fx - stx * gtest;
            double fym = fy - sty * gtest;
            double gm = g - gtest;
            double gxm = gx - gtest;
            double gym = gy - gtest;
            dcstep(stx, fxm, gxm, sty, fym, gym, stp, fm, gm, brackt, stmin, stmax);
            fx = fxm + stx * gtest;
            fy = fym + sty * gtest;
            gx = gxm + gtest;
            gy = gym + gtest;
        } else {
            dcstep(stx, fx, gx, sty, fy, gy, stp, fv, g, brackt, stmin, stmax);
        }

        if (brackt) {
            if (std::abs(sty - stx) >= 0.66 * width1) stp = stx + 0.5 * (sty - stx);
            width1 = width;
            width = std::abs(sty - stx);
            stmin = std::min(stx, sty);
            stmax = std::max(stx, sty);
        } else {
            stmin = stp + kXtrapLower * (stp - stx);
            stmax = stp + kXtrapUpper * (stp - stx);
        }

        stp = std::clamp(stp, kStpMin, kStpMax);
        if ((brackt && (stp <= stmin || stp >= stmax)) || (brackt && stmax - stmin <= kXtol * stmax)) stp = stx;
    }
    phi.fail("more-thuente: trial limit reached");
}

}  // namespace optlab
