#include "optlab/functions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>

namespace optlab {

std::string_view to_string(HessianStructure s) {
    switch (s) {
        case HessianStructure::Diagonal: return "diagonal";
        case HessianStructure::BlockDiagonal: return "block-diagonal";
        case HessianStructure::Banded: return "banded";
        case HessianStructure::Dense: return "dense";
    }
    return "dense";
}

namespace rules {

StartingPointRule repeat(std::vector<double> pattern) {
    std::ostringstream id;
    id << "repeat(";
    for (std::size_t i = 0; i < pattern.size(); ++i) id << (i ? "," : "") << pattern[i];
    id << ")";
    return {id.str(),
            [pattern](Index n) {
                Vector x(n);
                for (Index i = 0; i < n; ++i) x[i] = pattern[static_cast<std::size_t>(i) % pattern.size()];
                return x;
            },
            true};
}

StartingPointRule constant(double c) {
    std::ostringstream id;
    id << "constant(" << c << ")";
    return {id.str(), [c](Index n) { return Vector::Constant(n, c).eval(); }, true};
}

StartingPointRule indexed(double offset, double scale) {
    std::ostringstream id;
    id << "indexed(" << offset << "+" << scale << "*i)";
    return {id.str(),
            [offset, scale](Index n) {
                Vector x(n);
                for (Index i = 0; i < n; ++i) x[i] = offset + scale * static_cast<double>(i + 1);
                return x;
            },
            true};
}

StartingPointRule inverse_dimension() {
    return {"constant(1/n)", [](Index n) { return Vector::Constant(n, 1.0 / static_cast<double>(n)).eval(); },
            false};
}

}  // namespace rules

std::string FunctionSpec::dimension_constraint() const {
    if (multipleOf <= 1) return "any";
    if (multipleOf == 2) return "even";
    return "multiple of " + std::to_string(multipleOf);
}

Index FunctionSpec::admissible_at_least(Index n) const {
    Index m = std::max(n, minDimension);
    if (m % multipleOf != 0) m += multipleOf - m % multipleOf;
    return m;
}

namespace {

// Accumulates value, gradient and Hessian for the requested subset only.
class Accumulator {
public:
    Accumulator(Index n, const EvalRequest& req) : req_(req) {
        if (req.gradient) g_ = Vector::Zero(n);
        if (req.hessian) H_ = Matrix::Zero(n, n);
    }

    bool value() const { return req_.value; }
    bool gradient() const { return req_.gradient; }
    bool hessian() const { return req_.hessian; }

    void add_f(double v) { f_ += v; }
    void add_g(Index i, double v) { g_[i] += v; }
    void add_h(Index i, Index j, double v) {
        H_(i, j) += v;
        if (i != j) H_(j, i) += v;
    }
    Vector& g() { return g_; }
    Matrix& H() { return H_; }

    EvalResult finish() {
        EvalResult r;
        if (req_.value) r.value = f_;
        if (req_.gradient) r.gradient = std::move(g_);
        if (req_.hessian) r.hessian = std::move(H_);
        return r;
    }

private:
    EvalRequest req_;
    double f_ = 0.0;
    Vector g_;
    Matrix H_;
};

double idx1(Index i) { return static_cast<double>(i + 1); }

EvalResult ext_rosenbrock(const Vector& x, const EvalRequest& req) {
    Accumulator acc(x.size(), req);
    for (Index k = 0; k + 1 < x.size(); k += 2) {
        const double a = x[k], b = x[k + 1];
        const double r = b - a * a;
        acc.add_f(100.0 * r * r + (1.0 - a) * (1.0 - a));
        if (acc.gradient()) {
            acc.add_g(k, -400.0 * a * r - 2.0 * (1.0 - a));
            acc.add_g(k + 1, 200.0 * r);
        }
        if (acc.hessian()) {
            acc.add_h(k, k, 1200.0 * a * a - 400.0 * b + 2.0);
            acc.add_h(k, k + 1, -400.0 * a);
            acc.add_h(k + 1, k + 1, 200.0);
        }
    }
    return acc.finish();
}

EvalResult gen_rosenbrock(const Vector& x, const EvalRequest& req) {
    Accumulator acc(x.size(), req);
    for (Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i], b = x[i + 1];
        const double r = b - a * a;
        acc.add_f(100.0 * r * r + (1.0 - a) * (1.0 - a));
        if (acc.gradient()) {
            acc.add_g(i, -400.0 * a * r - 2.0 * (1.0 - a));
            acc.add_g(i + 1, 200.0 * r);
        }
        if (acc.hessian()) {
            acc.add_h(i, i, 1200.0 * a * a - 400.0 * b + 2.0);
            acc.add_h(i, i + 1, -400.0 * a);
            acc.add_h(i + 1, i + 1, 200.0);
        }
    }
    return acc.finish();
}

EvalResult ext_white_holst(const Vector& x, const EvalRequest& req) {
    constexpr double c = 100.0;
    Accumulator acc(x.size(), req);
    for (Index k = 0; k + 1 < x.size(); k += 2) {
        const double a = x[k], b = x[k + 1];
        const double r = b - a * a * a;
        acc.add_f(c * r * r + (1.0 - a) * (1.0 - a));
        if (acc.gradient()) {
            acc.add_g(k, -6.0 * c * a * a * r - 2.0 * (1.0 - a));
            acc.add_g(k + 1, 2.0 * c * r);
        }
        if (acc.hessian()) {
            acc.add_h(k, k, -12.0 * c * a * r + 18.0 * c * a * a * a * a + 2.0);
            acc.add_h(k, k + 1, -6.0 * c * a * a);
            acc.add_h(k + 1, k + 1, 2.0 * c);
        }
    }
    return acc.finish();
}

EvalResult ext_penalty(const Vector& x, const EvalRequest& req) {
    const Index n = x.size();
    Accumulator acc(n, req);
    const double s = x.squaredNorm() - 0.25;
    for (Index i = 0; i + 1 < n; ++i) acc.add_f((x[i] - 1.0) * (x[i] - 1.0));
    acc.add_f(s * s);
    if (acc.gradient()) {
        for (Index i = 0; i < n; ++i) acc.add_g(i, (i + 1 < n ? 2.0 * (x[i] - 1.0) : 0.0) + 4.0 * s * x[i]);
    }
    if (acc.hessian()) {
        acc.H().noalias() += 8.0 * x * x.transpose();
        for (Index i = 0; i < n; ++i) acc.H()(i, i) += (i + 1 < n ? 2.0 : 0.0) + 4.0 * s;
    }
    return acc.finish();
}

EvalResult perturbed_quadratic(const Vector& x, const EvalRequest& req) {
    const Index n = x.size();
    Accumulator acc(n, req);
    const double sum = x.sum();
    for (Index i = 0; i < n; ++i) acc.add_f(idx1(i) * x[i] * x[i]);
    acc.add_f(sum * sum / 100.0);
    if (acc.gradient()) {
        for (Index i = 0; i < n; ++i) acc.add_g(i, 2.0 * idx1(i) * x[i] + sum / 50.0);
    }
    if (acc.hessian()) {
        acc.H().array() += 1.0 / 50.0;
        for (Index i = 0; i < n; ++i) acc.H()(i, i) += 2.0 * idx1(i);
    }
    return acc.finish();
}

EvalResult raydan1(const Vector& x, const EvalRequest& req) {
    Accumulator acc(x.size(), req);
    for (Index i = 0; i < x.size(); ++i) {
        const double c = idx1(i) / 10.0, e = std::exp(x[i]);
        acc.add_f(c * (e - x[i]));
        if (acc.gradient()) acc.add_g(i, c * (e - 1.0));
        if (acc.hessian()) acc.add_h(i, i, c * e);
    }
    return acc.finish();
}

EvalResult raydan2(const Vector& x, const EvalRequest& req) {
    Accumulator acc(x.size(), req);
    for (Index i = 0; i < x.size(); ++i) {
        const double e = std::exp(x[i]);
        acc.add_f(e - x[i]);
        if (acc.gradient()) acc.add_g(i, e - 1.0);
        if (acc.hessian()) acc.add_h(i, i, e);
    }
    return acc.finish();
}

EvalResult diagonal1(const Vector& x, const EvalRequest& req) {
    Accumulator acc(x.size(), req);
    for (Index i = 0; i < x.size(); ++i) {
        const double e = std::exp(x[i]);
        acc.add_f(e - idx1(i) * x[i]);
        if (acc.gradient()) acc.add_g(i, e - idx1(i));
        if (acc.hessian()) acc.add_h(i, i, e);
    }
    return acc.finish();
}

EvalResult ext_tridiagonal1(const Vector& x, const EvalRequest& req) {
    Accumulator acc(x.size(), req);
    for (Index k = 0; k + 1 < x.size(); k += 2) {
        const double u = x[k] + x[k + 1] - 3.0;
        const double v = x[k] - x[k + 1] + 1.0;
        acc.add_f(u * u + v * v * v * v);
        if (acc.gradient()) {
            acc.add_g(k, 2.0 * u + 4.0 * v * v * v);
            acc.add_g(k + 1, 2.0 * u - 4.0 * v * v * v);
        }
        if (acc.hessian()) {
            acc.add_h(k, k, 2.0 + 12.0 * v * v);
            acc.add_h(k, k + 1, 2.0 - 12.0 * v * v);
            acc.add_h(k + 1, k + 1, 2.0 + 12.0 * v * v);
        }
    }
    return acc.finish();
}

EvalResult ext_himmelblau(const Vector& x, const EvalRequest& req) {
    Accumulator acc(x.size(), req);
    for (Index k = 0; k + 1 < x.size(); k += 2) {
        const double a = x[k], b = x[k + 1];
        const double p = a * a + b - 11.0;
        const double q = a + b * b - 7.0;
        acc.add_f(p * p + q * q);
        if (acc.gradient()) {
            acc.add_g(k, 4.0 * a * p + 2.0 * q);
            acc.add_g(k + 1, 2.0 * p + 4.0 * b * q);
        }
        if (acc.hessian()) {
            acc.add_h(k, k, 4.0 * p + 8.0 * a * a + 2.0);
            acc.add_h(k, k + 1, 4.0 * a + 4.0 * b);
            acc.add_h(k + 1, k + 1, 2.0 + 4.0 * q + 8.0 * b * b);
        }
    }
    return acc.finish();
}

EvalResult quadratic_qf1(const Vector& x, const EvalRequest& req) {
    const Index n = x.size();
    Accumulator acc(n, req);
    for (Index i = 0; i < n; ++i) {
        acc.add_f(0.5 * idx1(i) * x[i] * x[i]);
        if (acc.gradient()) acc.add_g(i, idx1(i) * x[i]);
        if (acc.hessian()) acc.add_h(i, i, idx1(i));
    }
    acc.add_f(-x[n - 1]);
    if (acc.gradient()) acc.add_g(n - 1, -1.0);
    return acc.finish();
}

EvalResult ext_powell(const Vector& x, const EvalRequest& req) {
    Accumulator acc(x.size(), req);
    for (Index k = 0; k + 3 < x.size(); k += 4) {
        const double a = x[k], b = x[k + 1], c = x[k + 2], d = x[k + 3];
        const double p = a + 10.0 * b, q = c - d, r = b - 2.0 * c, s = a - d;
        const double r2 = r * r, s2 = s * s;
        acc.add_f(p * p + 5.0 * q * q + r2 * r2 + 10.0 * s2 * s2);
        if (acc.gradient()) {
            acc.add_g(k, 2.0 * p + 40.0 * s2 * s);
            acc.add_g(k + 1, 20.0 * p + 4.0 * r2 * r);
            acc.add_g(k + 2, 10.0 * q - 8.0 * r2 * r);
            acc.add_g(k + 3, -10.0 * q - 40.0 * s2 * s);
        }
        if (acc.hessian()) {
            acc.add_h(k, k, 2.0 + 120.0 * s2);
            acc.add_h(k, k + 1, 20.0);
            acc.add_h(k, k + 3, -120.0 * s2);
            acc.add_h(k + 1, k + 1, 200.0 + 12.0 * r2);
            acc.add_h(k + 1, k + 2, -24.0 * r2);
            acc.add_h(k + 2, k + 2, 10.0 + 48.0 * r2);
            acc.add_h(k + 2, k + 3, -10.0);
            acc.add_h(k + 3, k + 3, 10.0 + 120.0 * s2);
        }
    }
    return acc.finish();
}

EvalResult ext_beale(const Vector& x, const EvalRequest& req) {
    Accumulator acc(x.size(), req);
    for (Index k = 0; k + 1 < x.size(); k += 2) {
        const double a = x[k], b = x[k + 1];
        const double b2 = b * b, b3 = b2 * b;
        // residuals t_j = c_j - a (1 - b^j) with their first and second partials
        const double c[3] = {1.5, 2.25, 2.625};
        const double w[3] = {1.0 - b, 1.0 - b2, 1.0 - b3};
        const double db[3] = {a, 2.0 * a * b, 3.0 * a * b2};     // dt/db
        const double dab[3] = {1.0, 2.0 * b, 3.0 * b2};         // d2t/da db
        const double dbb[3] = {0.0, 2.0 * a, 6.0 * a * b};      // d2t/db2
        for (int j = 0; j < 3; ++j) {
            const double t = c[j] - a * w[j];
            const double da = -w[j];
            acc.add_f(t * t);
            if (acc.gradient()) {
                acc.add_g(k, 2.0 * t * da);
                acc.add_g(k + 1, 2.0 * t * db[j]);
            }
            if (acc.hessian()) {
                acc.add_h(k, k, 2.0 * da * da);
                acc.add_h(k, k + 1, 2.0 * (da * db[j] + t * dab[j]));
                acc.add_h(k + 1, k + 1, 2.0 * (db[j] * db[j] + t * dbb[j]));
            }
        }
    }
    return acc.finish();
}

EvalResult fletchcr(const Vector& x, const EvalRequest& req) {
    constexpr double c = 100.0;
    Accumulator acc(x.size(), req);
    for (Index i = 0; i + 1 < x.size(); ++i) {
        const double u = x[i + 1] - x[i] + 1.0 - x[i] * x[i];
        const double du = -1.0 - 2.0 * x[i];
        acc.add_f(c * u * u);
        if (acc.gradient()) {
            acc.add_g(i, 2.0 * c * u * du);
            acc.add_g(i + 1, 2.0 * c * u);
        }
        if (acc.hessian()) {
            acc.add_h(i, i, 2.0 * c * (du * du - 2.0 * u));
            acc.add_h(i, i + 1, 2.0 * c * du);
            acc.add_h(i + 1, i + 1, 2.0 * c);
        }
    }
    return acc.finish();
}

struct Entry {
    FunctionSpec spec;
    FamilyEvaluator evaluator;
};

FunctionSpec make_spec(std::string name, Index min_dim, Index multiple_of, HessianStructure s, Index band,
                       StartingPointRule rule, std::optional<double> fstar, std::string formula) {
    FunctionSpec spec;
    spec.name = std::move(name);
    spec.minDimension = min_dim;
    spec.multipleOf = multiple_of;
    spec.supports = DerivativeSupport{true, true};
    spec.structure = s;
    spec.bandwidth = band;
    spec.startingPoint = std::move(rule);
    spec.knownMinimum = fstar;
    spec.formula = std::move(formula);
    return spec;
}

class Registry {
public:
    Registry() {
        using HS = HessianStructure;
        add(make_spec("ExtRosenbrock", 2, 2, HS::BlockDiagonal, 2, rules::repeat({-1.2, 1.0}), 0.0,
                      "sum_{i=1}^{n/2} 100(x_{2i}-x_{2i-1}^2)^2 + (1-x_{2i-1})^2"),
            ext_rosenbrock);
        add(make_spec("GenRosenbrock", 2, 1, HS::Banded, 1, rules::repeat({-1.2, 1.0}), 0.0,
                      "sum_{i=1}^{n-1} 100(x_{i+1}-x_i^2)^2 + (1-x_i)^2"),
            gen_rosenbrock);
        add(make_spec("ExtWhiteHolst", 2, 2, HS::BlockDiagonal, 2, rules::repeat({-1.2, 1.0}), 0.0,
                      "sum_{i=1}^{n/2} 100(x_{2i}-x_{2i-1}^3)^2 + (1-x_{2i-1})^2"),
            ext_white_holst);
        add(make_spec("ExtPenalty", 1, 1, HS::Dense, 0, rules::indexed(0.0, 1.0), std::nullopt,
                      "sum_{i=1}^{n-1} (x_i-1)^2 + (sum_{j=1}^n x_j^2 - 0.25)^2"),
            ext_penalty);
        add(make_spec("PerturbedQuadratic", 1, 1, HS::Dense, 0, rules::constant(0.5), 0.0,
                      "sum_{i=1}^n i x_i^2 + (1/100)(sum_{i=1}^n x_i)^2"),
            perturbed_quadratic);
        add(make_spec("Raydan1", 1, 1, HS::Diagonal, 0, rules::constant(1.0), std::nullopt,
                      "sum_{i=1}^n (i/10)(exp(x_i) - x_i)"),
            raydan1);
        add(make_spec("Raydan2", 1, 1, HS::Diagonal, 0, rules::constant(1.0), std::nullopt,
                      "sum_{i=1}^n exp(x_i) - x_i"),
            raydan2);
        add(make_spec("Diagonal1", 1, 1, HS::Diagonal, 0, rules::inverse_dimension(), std::nullopt,
                      "sum_{i=1}^n exp(x_i) - i x_i"),
            diagonal1);
        add(make_spec("ExtTridiagonal1", 2, 2, HS::BlockDiagonal, 2, rules::constant(2.0), 0.0,
                      "sum_{i=1}^{n/2} (x_{2i-1}+x_{2i}-3)^2 + (x_{2i-1}-x_{2i}+1)^4"),
            ext_tridiagonal1);
        add(make_spec("ExtHimmelblau", 2, 2, HS::BlockDiagonal, 2, rules::constant(1.0), 0.0,
                      "sum_{i=1}^{n/2} (x_{2i-1}^2+x_{2i}-11)^2 + (x_{2i-1}+x_{2i}^2-7)^2"),
            ext_himmelblau);
        add(make_spec("QuadraticQF1", 1, 1, HS::Diagonal, 0, rules::constant(1.0), std::nullopt,
                      "(1/2) sum_{i=1}^n i x_i^2 - x_n"),
            quadratic_qf1);
        add(make_spec("ExtPowell", 4, 4, HS::BlockDiagonal, 4, rules::repeat({3.0, -1.0, 0.0, 1.0}), 0.0,
                      "sum_{i=1}^{n/4} (x_{4i-3}+10x_{4i-2})^2 + 5(x_{4i-1}-x_{4i})^2 + (x_{4i-2}-2x_{4i-1})^4 "
                      "+ 10(x_{4i-3}-x_{4i})^4"),
            ext_powell);
        add(make_spec("ExtBeale", 2, 2, HS::BlockDiagonal, 2, rules::repeat({1.0, 0.8}), 0.0,
                      "sum_{i=1}^{n/2} (1.5-x_{2i-1}(1-x_{2i}))^2 + (2.25-x_{2i-1}(1-x_{2i}^2))^2 "
                      "+ (2.625-x_{2i-1}(1-x_{2i}^3))^2"),
            ext_beale);
        add(make_spec("Fletchcr", 2, 1, HS::Banded, 1, rules::constant(0.0), 0.0,
                      "sum_{i=1}^{n-1} 100(x_{i+1}-x_i+1-x_i^2)^2"),
            fletchcr);
    }

    void add(FunctionSpec spec, FamilyEvaluator evaluator) {
        if (spec.name.empty()) throw ConfigError("name", "function name must be non-empty");
        if (spec.minDimension < 1 || spec.multipleOf < 1) {
            throw ConfigError("minDimension", "dimension constraint must be positive");
        }
        if (!spec.admits(spec.minDimension)) {
            throw ConfigError("minDimension", "dimension constraint is not satisfiable at minDimension");
        }
        if (!spec.startingPoint.generator) throw ConfigError("startingPointRule", "starting-point rule is required");
        if (!evaluator) throw ConfigError("evaluator", "evaluator is required");
        std::unique_lock lock(mutex_);
        if (entries_.count(spec.name)) {
            throw Error(ErrorCode::DuplicateName, "function '" + spec.name + "' is already registered");
        }
        std::string key = spec.name;
        entries_.emplace(std::move(key), Entry{std::move(spec), std::move(evaluator)});
    }

    std::vector<FunctionSpec> list() const {
        std::shared_lock lock(mutex_);
        std::vector<FunctionSpec> out;
        out.reserve(entries_.size());
        for (const auto& [name, e] : entries_) out.push_back(e.spec);
        return out;
    }

    Entry find(std::string_view name) const {
        std::shared_lock lock(mutex_);
        auto it = entries_.find(std::string(name));
        if (it == entries_.end()) {
            throw Error(ErrorCode::UnknownFunction, "unknown function '" + std::string(name) + "'");
        }
        return it->second;
    }

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, Entry, std::less<>> entries_;
};

Registry& registry() {
    static Registry instance;
    return instance;
}

void check_dimension(const FunctionSpec& spec, Index n) {
    if (!spec.admits(n)) {
        std::ostringstream os;
        os << "function '" << spec.name << "' does not admit n=" << n << " (minimum " << spec.minDimension
           << ", dimension " << spec.dimension_constraint() << ")";
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
}

}  // namespace

std::vector<FunctionSpec> catalog() { return registry().list(); }

FunctionSpec function_spec(std::string_view name) { return registry().find(name).spec; }

void register_function(FunctionSpec spec, FamilyEvaluator evaluator) {
    registry().add(std::move(spec), std::move(evaluator));
}

Objective make_objective(std::string_view name, Index n) {
    Entry e = registry().find(name);
    check_dimension(e.spec, n);
    return Objective(e.spec.name, n, e.spec.supports, std::move(e.evaluator));
}

Vector starting_point(std::string_view name, Index n) {
    const FunctionSpec spec = registry().find(name).spec;
    check_dimension(spec, n);
    return spec.startingPoint(n);
}

EvalResult evaluate_catalog_function(std::string_view name, const Vector& x, const EvalRequest& req) {
    EvalCounters scratch;
    return evaluate(make_objective(name, x.size()), x, req, scratch);
}

Index default_dimension(const FunctionSpec& spec, bool second_order) {
    return spec.admissible_at_least(second_order ? 10 : 100);
}

}  // namespace optlab
