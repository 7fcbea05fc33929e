#include "oracles.hpp"

#include "optlab/config.hpp"
#include "optlab/core.hpp"
#include "optlab/finite_diff.hpp"
#include "optlab/functions.hpp"
#include "optlab/methods.hpp"

#include <doctest.h>

#include <limits>

using namespace optlab;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

Objective one_d(std::function<double(double)> f) {
    return Objective("1d", 1, {false, false}, [f](const Vector& x, const EvalRequest& r) {
        EvalResult out;
        if (r.value) out.value = f(x(0));
        return out;
    });
}

template <class F>
ConfigError config_error(F&& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected ConfigError");
    return ConfigError("", "");
}

}  // namespace

TEST_CASE("evaluate counts one per requested object") {
    const Objective f = make_objective("ExtRosenbrock", 2);
    EvalCounters c;
    auto r = evaluate(f, vec({1, 1}), EvalRequest::Value(), c);
    CHECK(*r.value == 0.0);
    CHECK_FALSE(r.gradient.has_value());
    CHECK(c == EvalCounters{1, 0, 0});

    r = evaluate(f, vec({1, 1}), EvalRequest::Gradient(), c);
    CHECK(r.gradient->isZero());
    CHECK_FALSE(r.value.has_value());
    CHECK(c == EvalCounters{1, 1, 0});

    r = evaluate(f, vec({-1.2, 1}), EvalRequest::ValueGradient(), c);
    CHECK(*r.value == doctest::Approx(24.2).epsilon(1e-14));
    CHECK(c == EvalCounters{2, 2, 0});

    evaluate(f, vec({0.3, 0.1}), EvalRequest::All(), c);
    CHECK(c == EvalCounters{3, 3, 1});
    CHECK(c.total() == 7);
}

TEST_CASE("evaluate errors") {
    EvalCounters c;
    const Objective valueOnly = one_d([](double x) { return x * x; });
    try {
        evaluate(valueOnly, vec({1}), EvalRequest::Gradient(), c);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedDerivative);
    }
    try {
        evaluate(valueOnly, vec({1, 2}), EvalRequest::Value(), c);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
    const Objective nan = one_d([](double) { return std::numeric_limits<double>::quiet_NaN(); });
    try {
        evaluate(nan, vec({1}), EvalRequest::Value(), c);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteResult);
    }
}

TEST_CASE("counters add componentwise") {
    const EvalCounters a{1, 2, 3}, b{10, 20, 30};
    CHECK(a + b == EvalCounters{11, 22, 33});
}

TEST_CASE("should_stop order and thresholds") {
    StoppingCriteria c;
    CHECK(should_stop(5, 1e-7, 3.0, 2.0, c) == TerminationReason::GradientTolerance);
    CHECK(should_stop(10000, 1.0, 3.0, 2.0, c) == TerminationReason::MaxIterations);
    CHECK(should_stop(10000, 1e-9, 1.0, 1.0, c) == TerminationReason::MaxIterations);
    CHECK(should_stop(3, 1e-9, 1.0, 1.0, c) == TerminationReason::GradientTolerance);
    CHECK(should_stop(3, 10.0, 1.0, 1.0, c) == TerminationReason::WorkPrecision);
    CHECK_FALSE(should_stop(0, 10.0, std::nullopt, 1.0, c).has_value());
    CHECK_FALSE(should_stop(3, 10.0, 2.0, 1.0, c).has_value());
    // pure
    CHECK(should_stop(3, 10.0, 1.0, 1.0, c) == should_stop(3, 10.0, 1.0, 1.0, c));
}

TEST_CASE("stopping validation") {
    StoppingCriteria s;
    s.validate();
    s.maxIterNum = 0;
    CHECK(config_error([&] { s.validate(); }).field() == "maxIter");
    s = {};
    s.epsilon = 0.0;
    CHECK(config_error([&] { s.validate(); }).field() == "epsilon");
    s = {};
    s.workPrec = -1.0;
    CHECK(config_error([&] { s.validate(); }).field() == "workPrec");
}

TEST_CASE("finite differences") {
    const Objective sq = one_d([](double x) { return x * x; });
    CHECK(finite_diff_gradient(sq, vec({3}), 1e-5)(0) == doctest::Approx(6.0).epsilon(1e-8));

    const Objective rb = make_objective("ExtRosenbrock", 2);
    const Vector x = vec({-1.2, 1});
    const Vector ga = *rb.raw(x, EvalRequest::Gradient()).gradient;
    const Vector gf = finite_diff_gradient(rb, x, 1e-6);
    CHECK((ga - gf).norm() / ga.norm() <= 1e-5);

    const Objective c = Objective("const", 3, {false, false}, [](const Vector&, const EvalRequest&) {
        EvalResult r;
        r.value = 7.0;
        return r;
    });
    CHECK(finite_diff_gradient(c, vec({1, 2, 3}), 1e-5).isZero());
    CHECK(finite_diff_hessian(c, vec({1, 2, 3}), 1e-4).isZero());

    Matrix A(2, 2);
    A << 2, 0, 0, 4;
    const Matrix Hq = finite_diff_hessian(oracle::quadratic(A), vec({0.7, -2.0}), 1e-4);
    CHECK((Hq - A).cwiseAbs().maxCoeff() <= 1e-4);
    CHECK((Hq - Hq.transpose()).norm() == 0.0);

    const Matrix Hr = finite_diff_hessian(rb, vec({1, 1}), 1e-4);
    CHECK((Hr - *rb.raw(vec({1, 1}), EvalRequest::Hessian()).hessian).cwiseAbs().maxCoeff() <= 1e-3);

    const Objective lin = Objective("lin", 2, {false, false}, [](const Vector& z, const EvalRequest&) {
        EvalResult r;
        r.value = 3.0 * z(0) - z(1);
        return r;
    });
    CHECK(finite_diff_hessian(lin, vec({5, 5}), 1e-4).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("finite differences count value evaluations") {
    const Objective rb = make_objective("ExtRosenbrock", 4);
    EvalCounters c;
    finite_diff_gradient(rb, Vector::Ones(4), 1e-6, c);
    CHECK(c == EvalCounters{8, 0, 0});
}

TEST_CASE("with_finite_differences serves derivatives") {
    const Objective value = one_d([](double x) { return std::pow(x - 2.0, 2); });
    const Objective f = with_finite_differences(value);
    CHECK(f.supports().gradient);
    CHECK(f.supports().hessian);
    const EvalResult r = f.raw(vec({5}), EvalRequest::All());
    CHECK(r.gradient->coeff(0) == doctest::Approx(6.0).epsilon(1e-6));
    CHECK(r.hessian->coeff(0, 0) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("line-search config validation names the field") {
    auto cfg = default_line_search_config(LineSearchRule::Goldstein);
    cfg.validate();
    cfg.rho = 0.5;
    CHECK(config_error([&] { cfg.validate(); }).field() == "rho");
    cfg.rho = 0.7;
    CHECK(config_error([&] { cfg.validate(); }).field() == "rho");

    cfg = default_line_search_config(LineSearchRule::Wolfe);
    cfg.sigma = cfg.rho;
    CHECK(config_error([&] { cfg.validate(); }).field() == "sigma");
    cfg = default_line_search_config(LineSearchRule::StrongWolfe);
    cfg.sigma = 1.0;
    CHECK(config_error([&] { cfg.validate(); }).field() == "sigma");

    cfg = default_line_search_config(LineSearchRule::ApproxWolfe);
    cfg.validate();
    cfg.rho = 0.6;
    CHECK(config_error([&] { cfg.validate(); }).field() == "rho");

    cfg = default_line_search_config(LineSearchRule::Backtracking);
    cfg.beta = 1.0;
    CHECK(config_error([&] { cfg.validate(); }).field() == "beta");

    cfg = default_line_search_config(LineSearchRule::NonMonotone);
    cfg.bigM = 0;
    CHECK(config_error([&] { cfg.validate(); }).field() == "M");

    cfg = default_line_search_config(LineSearchRule::FixedStep);
    cfg.tInit = 0.0;
    CHECK(config_error([&] { cfg.validate(); }).field() == "tInit");
    cfg.tInit = std::numeric_limits<double>::infinity();
    CHECK(config_error([&] { cfg.validate(); }).field() == "tInit");
    // rho is not consumed by a fixed step
    cfg.tInit = 1.0;
    cfg.rho = 5.0;
    cfg.validate();
}

TEST_CASE("line-search rule names round-trip") {
    CHECK(all_line_search_rules().size() >= 10);
    for (LineSearchRule r : all_line_search_rules()) CHECK(parse_line_search_rule(to_string(r)) == r);
    try {
        parse_line_search_rule("Nope");
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownLineSearch);
    }
}

TEST_CASE("default pairings") {
    auto p = default_pairing("CG_DESCENT");
    REQUIRE(p.lineSearch);
    CHECK(p.lineSearch->rule == LineSearchRule::ApproxWolfe);
    CHECK(p.lineSearch->rho == 0.1);
    CHECK(p.lineSearch->sigma == 0.9);

    p = default_pairing("Newton");
    CHECK(p.lineSearch->rule == LineSearchRule::FixedStep);
    CHECK(p.lineSearch->tInit == 1.0);

    p = default_pairing("BFGS");
    CHECK(p.lineSearch->rule == LineSearchRule::StrongWolfe);
    CHECK(p.lineSearch->rho == 1e-4);
    CHECK(p.lineSearch->sigma == 0.9);

    CHECK(default_pairing("L-BFGS").lineSearch->rule == LineSearchRule::MoreThuente);
    CHECK(default_pairing("BarzilaiBorwein").lineSearch->rule == LineSearchRule::NonMonotone);
    CHECK(default_pairing("ScalarCorrection").lineSearch->rule == LineSearchRule::NonMonotone);
    CHECK(default_pairing("GradientDescent").lineSearch->rule == LineSearchRule::Backtracking);
    for (const char* m : {"FletcherReeves", "PolakRibiere", "HestenesStiefel", "DaiYuan"}) {
        const auto q = default_pairing(m);
        CHECK(q.lineSearch->rule == LineSearchRule::StrongWolfe);
        CHECK(q.lineSearch->sigma == 0.1);
    }
    for (const char* m : {"GoldsteinPrice", "Levenberg", "LevenbergMarquardt"})
        CHECK(default_pairing(m).lineSearch->rule == LineSearchRule::Wolfe);
    CHECK(default_pairing("GoldsteinPrice").extras.at("eta") == 0.2);
    CHECK(default_pairing("Levenberg").extras.at("lambda0") == 1e-3);
    CHECK(default_pairing("LevenbergMarquardt").extras.at("nu") == 10.0);
    CHECK(default_pairing("L-BFGS").extras.at("lbfgsMemory") == 10.0);
    for (const char* m : {"Dogleg", "DoglegSR1"}) {
        const auto q = default_pairing(m);
        CHECK_FALSE(q.lineSearch.has_value());
        CHECK(q.extras.at("trustRadius0") == 1.0);
        CHECK(q.extras.at("trustRadiusMax") == 100.0);
        CHECK(q.extras.at("eta") == 1e-3);
    }
    try {
        default_pairing("Nope");
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownMethod);
    }
}

TEST_CASE("every registered method has a pairing") {
    for (const MethodInfo& m : method_registry()) {
        const auto p = default_pairing(m.name);
        CHECK(p.lineSearch.has_value() == m.usesLineSearch);
        if (p.lineSearch) p.lineSearch->validate();
    }
}

TEST_CASE("resolve_config") {
    SolverConfig c;
    c.methodName = "CG_DESCENT";
    c.defaultMode = true;
    c.lineSearch = default_line_search_config(LineSearchRule::Backtracking);
    auto r = resolve_config(c);
    CHECK(r.lineSearch->rule == LineSearchRule::ApproxWolfe);

    c.defaultMode = false;
    r = resolve_config(c);
    CHECK(r.lineSearch->rule == LineSearchRule::Backtracking);

    c.lineSearch.reset();
    CHECK(config_error([&] { resolve_config(c); }).field() == "lineSearch");

    SolverConfig tr;
    tr.methodName = "Dogleg";
    tr.defaultMode = false;
    tr.lineSearch = default_line_search_config(LineSearchRule::Wolfe);
    CHECK(config_error([&] { resolve_config(tr); }).field() == "lineSearch");
    tr.lineSearch.reset();
    r = resolve_config(tr);
    CHECK(r.extra("trustRadius0", 0) == 1.0);

    SolverConfig g;
    g.methodName = "BFGS";
    g.methodGroup = "Newton";
    CHECK(config_error([&] { resolve_config(g); }).field() == "methodGroup");
    g.methodGroup = "Quasi Newton";
    resolve_config(g);

    SolverConfig bad;
    bad.methodName = "BFGS";
    bad.stopping.epsilon = -1;
    CHECK(config_error([&] { resolve_config(bad); }).field() == "epsilon");

    SolverConfig unk;
    unk.methodName = "Nope";
    try {
        resolve_config(unk);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownMethod);
    }
}

TEST_CASE("method registry") {
    const auto groups = method_groups();
    CHECK(groups.size() == 6);
    CHECK(method_registry().size() == 18);
    CHECK_FALSE(method_info("Dogleg").usesLineSearch);
    CHECK(method_info("Newton").derivativeOrder == 2);
    CHECK(method_info("DoglegSR1").derivativeOrder == 1);
    int cg = 0;
    for (const auto& m : method_registry()) cg += m.group == "Conjugate Gradient";
    CHECK(cg == 5);
}
