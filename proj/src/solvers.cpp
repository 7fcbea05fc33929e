#include "optlab/solvers.hpp"

#include "optlab/linalg.hpp"
#include "optlab/methods.hpp"
#include "optlab/quasi_newton.hpp"
#include "optlab/trust_region.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace optlab {

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

namespace {
constexpr double kTinyDenominator = 1e-30;
constexpr double kHzEta = 0.01;
}  // namespace

std::optional<double> cg_beta(CgVariant variant, const Vector& g, const Vector& gPrev, const Vector& pPrev) {
    const Vector y = g - gPrev;
    auto guarded = [](double num, double den) -> std::optional<double> {
        if (!(std::abs(den) >= kTinyDenominator)) return std::nullopt;
        return num / den;
    };
    switch (variant) {
        case CgVariant::FletcherReeves: return guarded(g.squaredNorm(), gPrev.squaredNorm());
        case CgVariant::PolakRibierePlus: {
            auto b = guarded(g.dot(y), gPrev.squaredNorm());
            if (b) b = std::max(*b, 0.0);
            return b;
        }
        case CgVariant::HestenesStiefel: return guarded(g.dot(y), pPrev.dot(y));
        case CgVariant::DaiYuan: return guarded(g.squaredNorm(), pPrev.dot(y));
        case CgVariant::HagerZhang: {
            const double py = pPrev.dot(y);
            if (!(std::abs(py) >= kTinyDenominator)) return std::nullopt;
            const double beta = (y - (2.0 * y.squaredNorm() / py) * pPrev).dot(g) / py;
            // Lower truncation from CG_DESCENT keeps the direction a descent direction.
            const double etaK = -1.0 / (pPrev.norm() * std::min(kHzEta, gPrev.norm()));
            return std::max(beta, etaK);
        }
    }
    return std::nullopt;
}

double barzilai_borwein_step(const Vector& s, const Vector& y) {
    const double yy = y.squaredNorm();
    if (yy == 0.0) return 1.0;
    const double t = s.dot(y) / yy;
    return (t > 0.0 && std::isfinite(t)) ? t : 1.0;
}

double scalar_correction_step(const Vector& s, const Vector& y, double t) {
    const double yn = y.norm();
    if (yn == 0.0) return 1.0;
    const Vector r = s - t * y;
    const double yr = y.dot(r);
    const double fallback = s.norm() / yn;
    if (yr > 0.0) {
        const double v = s.dot(r) / yr;
        if (v > 0.0 && std::isfinite(v)) return v;
    }
    return (fallback > 0.0 && std::isfinite(fallback)) ? fallback : 1.0;
}

Vector levenberg_direction(const Matrix& G, const Vector& g, double lambda, bool marquardt) {
    Matrix A = G;
    if (marquardt) {
        for (Index i = 0; i < A.rows(); ++i) A(i, i) += lambda * std::max(std::abs(G(i, i)), 1e-8);
    } else {
        A.diagonal().array() += lambda;
    }
    return solve_symmetric(A, -g);
}

Vector goldstein_price_direction(const Matrix& G, const Vector& g, double eta) {
    try {
        const Vector dn = solve_symmetric(G, -g);
        const double denom = g.norm() * dn.norm();
        if (denom > 0.0 && std::isfinite(denom)) {
            const double cosTheta = -g.dot(dn) / denom;
            if (cosTheta >= eta) return dn;
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMatrix) throw;
    }
    return -g;
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

struct Iterate {
    Vector x;
    double f = 0.0;
    Vector g;
};

struct Direction {
    Vector d;
    std::optional<double> trialStep;
    std::optional<double> beta;
};

/// Everything the strategies need to evaluate extra objects. Counting happens
/// in the wrapper objective, so the scratch counters are discarded.
struct Context {
    Objective f;

    Matrix hessian(const Vector& x) const {
        EvalCounters scratch;
        return *evaluate(f, x, EvalRequest::Hessian(), scratch).hessian;
    }
    double value_or_inf(const Vector& x) const {
        EvalCounters scratch;
        try {
            return evaluate_value(f, x, scratch);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonFiniteResult) throw;
            return std::numeric_limits<double>::infinity();
        }
    }
};

class Strategy {
public:
    virtual ~Strategy() = default;
    virtual Direction direction(const Iterate& cur, long k) = 0;
    virtual void after_step(const Iterate&, const Iterate&, double /*t*/, const Vector& /*d*/) {}
    virtual const Matrix* inverse_hessian() const { return nullptr; }
};

class SteepestDescent final : public Strategy {
public:
    Direction direction(const Iterate& cur, long) override { return {-cur.g, std::nullopt, std::nullopt}; }
};

class TwoPoint final : public Strategy {
public:
    explicit TwoPoint(bool scalarCorrection) : sc_(scalarCorrection) {}
    Direction direction(const Iterate& cur, long) override { return {-cur.g, next_, std::nullopt}; }
    void after_step(const Iterate& prev, const Iterate& next, double t, const Vector&) override {
        const Vector s = next.x - prev.x, y = next.g - prev.g;
        next_ = sc_ ? scalar_correction_step(s, y, t) : barzilai_borwein_step(s, y);
    }

private:
    bool sc_;
    std::optional<double> next_;
};

class ConjugateGradient final : public Strategy {
public:
    ConjugateGradient(CgVariant v, Index n) : variant_(v), n_(std::max<Index>(n, 1)) {}

    Direction direction(const Iterate& cur, long k) override {
        Direction out;
        std::optional<double> beta;
        if (k > 0 && sinceRestart_ < n_) beta = cg_beta(variant_, cur.g, gPrev_, pPrev_);
        if (beta) {
            out.d = -cur.g + *beta * pPrev_;
            if (out.d.dot(cur.g) >= 0.0) beta.reset();
        }
        if (!beta) {
            out.d = -cur.g;
            sinceRestart_ = 0;
            beta = 0.0;
        }
        out.beta = beta;
        ++sinceRestart_;
        pPrev_ = out.d;
        gPrev_ = cur.g;
        return out;
    }

private:
    CgVariant variant_;
    Index n_;
    Index sinceRestart_ = 0;
    Vector pPrev_, gPrev_;
};

class NewtonStrategy final : public Strategy {
public:
    explicit NewtonStrategy(const Context& ctx) : ctx_(ctx) {}
    Direction direction(const Iterate& cur, long) override {
        return {solve_symmetric(ctx_.hessian(cur.x), -cur.g), std::nullopt, std::nullopt};
    }

private:
    const Context& ctx_;
};

class GoldsteinPriceStrategy final : public Strategy {
public:
    GoldsteinPriceStrategy(const Context& ctx, double eta) : ctx_(ctx), eta_(eta) {}
    Direction direction(const Iterate& cur, long) override {
        return {goldstein_price_direction(ctx_.hessian(cur.x), cur.g, eta_), std::nullopt, std::nullopt};
    }

private:
    const Context& ctx_;
    double eta_;
};

class LevenbergStrategy final : public Strategy {
public:
    LevenbergStrategy(const Context& ctx, double lambda0, double nu, bool marquardt)
        : ctx_(ctx), lambda_(lambda0), nu_(nu), marquardt_(marquardt) {}

    Direction direction(const Iterate& cur, long) override {
        const Matrix G = ctx_.hessian(cur.x);
        for (int j = 0; j < 50; ++j) {
            Vector d;
            try {
                d = levenberg_direction(G, cur.g, lambda_, marquardt_);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::SingularMatrix) throw;
                lambda_ *= nu_;
                continue;
            }
            if (all_finite(d) && cur.g.dot(d) < 0.0 && ctx_.value_or_inf(cur.x + d) < cur.f) {
                lambda_ /= nu_;
                return {d, 1.0, std::nullopt};
            }
            lambda_ *= nu_;
        }
        throw Error(ErrorCode::SingularMatrix, "damping loop exhausted without a decrease");
    }

private:
    const Context& ctx_;
    double lambda_, nu_;
    bool marquardt_;
};

enum class DenseUpdate { SR1, DFP, BFGS };

class DenseQuasiNewton final : public Strategy {
public:
    DenseQuasiNewton(DenseUpdate u, Index n) : update_(u), H_(Matrix::Identity(n, n)) {}

    Direction direction(const Iterate& cur, long) override {
        Vector d = -(H_ * cur.g);
        if (!(d.dot(cur.g) < 0.0) || !all_finite(d)) {
            H_.setIdentity();
            fresh_ = true;
            d = -cur.g;
        }
        return {d, std::nullopt, std::nullopt};
    }
    void after_step(const Iterate& prev, const Iterate& next, double, const Vector&) override {
        const Vector s = next.x - prev.x, y = next.g - prev.g;
        // DFP is poor at correcting a badly scaled H, so rescale I once before the first update.
        if (update_ == DenseUpdate::DFP && fresh_ && s.dot(y) > 0.0) {
            H_ = Matrix::Identity(s.size(), s.size()) * (s.dot(y) / y.squaredNorm());
            fresh_ = false;
        }
        switch (update_) {
            case DenseUpdate::SR1: sr1_update(H_, s, y); break;
            case DenseUpdate::DFP: dfp_update(H_, s, y); break;
            case DenseUpdate::BFGS: bfgs_update(H_, s, y); break;
        }
    }
    const Matrix* inverse_hessian() const override { return &H_; }

private:
    DenseUpdate update_;
    Matrix H_;
    bool fresh_ = true;
};

class LimitedMemoryBfgs final : public Strategy {
public:
    explicit LimitedMemoryBfgs(std::size_t m) : mem_(m) {}
    Direction direction(const Iterate& cur, long) override {
        Vector d = lbfgs_direction(mem_, cur.g);
        if (!(d.dot(cur.g) < 0.0) || !all_finite(d)) {
            mem_.clear();
            d = -cur.g;
        }
        return {d, std::nullopt, std::nullopt};
    }
    void after_step(const Iterate& prev, const Iterate& next, double, const Vector&) override {
        mem_.push(next.x - prev.x, next.g - prev.g);
    }

private:
    LbfgsMemory mem_;
};

TerminationReason classify(const Error& e) {
    switch (e.code()) {
        case ErrorCode::LineSearchFailure:
        case ErrorCode::NotDescentDirection:
        case ErrorCode::RoundingStall:
            return TerminationReason::LineSearchFailure;
        case ErrorCode::UnsupportedDerivative:
        case ErrorCode::DimensionMismatch:
            throw e;
        default:
            return TerminationReason::NumericalFailure;
    }
}

bool past(const SolveOptions& opt) { return opt.deadline && Clock::now() >= *opt.deadline; }

constexpr const char* kDeadlineMessage = "wall-clock limit reached";

void finish(SolveReport& rep, const Iterate& cur, long k) {
    rep.fmin = cur.f;
    rep.xmin = cur.x;
    rep.iterations = k;
}

SolveReport run_line_search(const Context& ctx, Strategy& st, LineSearch& ls, const Vector& x0,
                            const StoppingCriteria& stop, const SolveOptions& opt) {
    SolveReport rep;
    EvalCounters scratch;
    Iterate cur;
    cur.x = x0;
    try {
        EvalResult r = evaluate(ctx.f, x0, EvalRequest::ValueGradient(), scratch);
        cur.f = *r.value;
        cur.g = std::move(*r.gradient);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFiniteResult) throw;
        rep.terminationReason = TerminationReason::NumericalFailure;
        rep.message = e.what();
        rep.fmin = std::numeric_limits<double>::quiet_NaN();
        rep.xmin = x0;
        return rep;
    }
    rep.trace.push(cur.f, cur.g.norm());

    std::optional<double> fPrev;
    long k = 0;
    while (true) {
        if (auto r = should_stop(k, cur.g.norm(), fPrev, cur.f, stop)) {
            rep.terminationReason = *r;
            break;
        }
        if (past(opt)) {
            rep.terminationReason = TerminationReason::MaxIterations;
            rep.message = kDeadlineMessage;
            break;
        }
        Direction dir;
        LineSearchOutcome out;
        try {
            dir = st.direction(cur, k);
            LineSearchProblem p{cur.x, dir.d, cur.f, cur.g, dir.trialStep};
            out = ls.search(ctx.f, p);
        } catch (const Error& e) {
            rep.terminationReason = classify(e);
            rep.message = e.what();
            break;
        }
        const double slope = cur.g.dot(dir.d);
        Iterate next{std::move(out.xNew), out.fNew, std::move(out.gNew)};
        st.after_step(cur, next, out.t, dir.d);
        fPrev = cur.f;
        cur = std::move(next);
        ++k;
        rep.trace.push(cur.f, cur.g.norm());
        if (opt.observer) {
            opt.observer(IterationEvent{k, cur.x, cur.g, dir.d, out.t, cur.f, slope, dir.beta, st.inverse_hessian(),
                                        true});
        }
    }
    finish(rep, cur, k);
    return rep;
}

SolveReport run_trust_region(const Context& ctx, bool sr1, const Vector& x0, const SolverConfig& cfg,
                             const SolveOptions& opt) {
    double delta = cfg.extra("trustRadius0", 1.0);
    const double deltaMax = cfg.extra("trustRadiusMax", 100.0);
    const double eta = cfg.extra("eta", 1e-3);
    const Index n = x0.size();

    SolveReport rep;
    EvalCounters scratch;
    Iterate cur;
    cur.x = x0;
    Matrix B, H;
    try {
        EvalResult r = evaluate(ctx.f, x0, sr1 ? EvalRequest::ValueGradient() : EvalRequest::All(), scratch);
        cur.f = *r.value;
        cur.g = std::move(*r.gradient);
        B = sr1 ? Matrix::Identity(n, n) : std::move(*r.hessian);
        if (sr1) H = Matrix::Identity(n, n);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFiniteResult) throw;
        rep.terminationReason = TerminationReason::NumericalFailure;
        rep.message = e.what();
        rep.fmin = std::numeric_limits<double>::quiet_NaN();
        rep.xmin = x0;
        return rep;
    }
    rep.trace.push(cur.f, cur.g.norm());

    std::optional<double> fPrev;
    long k = 0;
    while (true) {
        if (auto r = should_stop(k, cur.g.norm(), fPrev, cur.f, cfg.stopping)) {
            rep.terminationReason = *r;
            break;
        }
        if (past(opt)) {
            rep.terminationReason = TerminationReason::MaxIterations;
            rep.message = kDeadlineMessage;
            break;
        }
        Vector d;
        try {
            d = dogleg_step(cur.g, B, delta, sr1 ? std::optional<Vector>(-(H * cur.g)) : std::nullopt);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonPositiveCurvature) {
                rep.terminationReason = classify(e);
                rep.message = e.what();
                break;
            }
            d = -(delta / cur.g.norm()) * cur.g;
        }
        const double predicted = -model_value(cur.g, B, d);

        Iterate trial;
        trial.x = cur.x + d;
        bool finiteTrial = true;
        try {
            EvalResult r = evaluate(ctx.f, trial.x, EvalRequest::ValueGradient(), scratch);
            trial.f = *r.value;
            trial.g = std::move(*r.gradient);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonFiniteResult) throw;
            finiteTrial = false;
        }
        const double ratio = (finiteTrial && predicted > 0.0) ? (cur.f - trial.f) / predicted
                                                              : -std::numeric_limits<double>::infinity();
        if (sr1 && finiteTrial) {
            const Vector y = trial.g - cur.g;
            sr1_update(H, d, y);
            sr1_update(B, y, d);
        }
        if (ratio < 0.25) {
            delta *= 0.25;
        } else if (ratio > 0.75 && d.norm() >= 0.99 * delta) {
            delta = std::min(2.0 * delta, deltaMax);
        }
        const bool accepted = finiteTrial && ratio > eta;
        if (accepted) {
            fPrev = cur.f;
            cur = std::move(trial);
            if (!sr1) {
                try {
                    B = ctx.hessian(cur.x);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::NonFiniteResult) throw;
                    ++k;
                    rep.trace.push(cur.f, cur.g.norm());
                    rep.terminationReason = TerminationReason::NumericalFailure;
                    rep.message = e.what();
                    break;
                }
            }
        } else {
            fPrev.reset();
        }
        ++k;
        rep.trace.push(cur.f, cur.g.norm());
        if (opt.observer) {
            opt.observer(IterationEvent{k, cur.x, cur.g, d, 1.0, cur.f, 0.0, std::nullopt, sr1 ? &H : nullptr,
                                        accepted});
        }
        if (delta < 1e-15) {
            rep.terminationReason = TerminationReason::NumericalFailure;
            rep.message = "trust radius underflow";
            break;
        }
    }
    finish(rep, cur, k);
    return rep;
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, const Context& ctx, const SolverConfig& cfg,
                                        Index n) {
    if (name == "GradientDescent") return std::make_unique<SteepestDescent>();
    if (name == "BarzilaiBorwein") return std::make_unique<TwoPoint>(false);
    if (name == "ScalarCorrection") return std::make_unique<TwoPoint>(true);
    if (name == "FletcherReeves") return std::make_unique<ConjugateGradient>(CgVariant::FletcherReeves, n);
    if (name == "PolakRibiere") return std::make_unique<ConjugateGradient>(CgVariant::PolakRibierePlus, n);
    if (name == "HestenesStiefel") return std::make_unique<ConjugateGradient>(CgVariant::HestenesStiefel, n);
    if (name == "DaiYuan") return std::make_unique<ConjugateGradient>(CgVariant::DaiYuan, n);
    if (name == "CG_DESCENT") return std::make_unique<ConjugateGradient>(CgVariant::HagerZhang, n);
    if (name == "Newton") return std::make_unique<NewtonStrategy>(ctx);
    if (name == "GoldsteinPrice") return std::make_unique<GoldsteinPriceStrategy>(ctx, cfg.extra("eta", 0.2));
    if (name == "Levenberg" || name == "LevenbergMarquardt")
        return std::make_unique<LevenbergStrategy>(ctx, cfg.extra("lambda0", 1e-3), cfg.extra("nu", 10.0),
                                                   name == "LevenbergMarquardt");
    if (name == "SR1") return std::make_unique<DenseQuasiNewton>(DenseUpdate::SR1, n);
    if (name == "DFP") return std::make_unique<DenseQuasiNewton>(DenseUpdate::DFP, n);
    if (name == "BFGS") return std::make_unique<DenseQuasiNewton>(DenseUpdate::BFGS, n);
    if (name == "L-BFGS")
        return std::make_unique<LimitedMemoryBfgs>(static_cast<std::size_t>(cfg.extra("lbfgsMemory", 10.0)));
    throw Error(ErrorCode::UnknownMethod, "no implementation for method '" + name + "'");
}

}  // namespace

SolveReport solve(const Objective& f, const Vector& x0, const SolverConfig& config, const SolveOptions& options) {
    const SolverConfig cfg = resolve_config(config);
    const MethodInfo& info = method_info(cfg.methodName);
    if (x0.size() != f.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "starting point has dimension " + std::to_string(x0.size()) +
                                                      ", objective expects " + std::to_string(f.dimension()));
    }
    if (!f.supports().gradient)
        throw Error(ErrorCode::UnsupportedDerivative, info.name + " needs the gradient of '" + f.name() + "'");
    if (info.derivativeOrder >= 2 && !f.supports().hessian)
        throw Error(ErrorCode::UnsupportedDerivative, info.name + " needs the Hessian of '" + f.name() + "'");

    auto tally = std::make_shared<EvalCounters>();
    Objective inner = f;
    Context ctx{Objective(f.name(), f.dimension(), f.supports(), [tally, inner](const Vector& x, const EvalRequest& r) {
        if (r.value) ++tally->nValue;
        if (r.gradient) ++tally->nGradient;
        if (r.hessian) ++tally->nHessian;
        return inner.raw(x, r);
    })};

    const auto start = Clock::now();
    SolveReport rep;
    if (!info.usesLineSearch) {
        rep = run_trust_region(ctx, info.name == "DoglegSR1", x0, cfg, options);
    } else {
        std::shared_ptr<LineSearch> ls = options.lineSearch;
        if (!ls) ls = make_line_search(*cfg.lineSearch);
        auto st = make_strategy(info.name, ctx, cfg, f.dimension());
        rep = run_line_search(ctx, *st, *ls, x0, cfg.stopping, options);
    }
    rep.cpuSeconds = std::chrono::duration<double>(Clock::now() - start).count();
    rep.counters = *tally;
    return rep;
}

}  // namespace optlab
