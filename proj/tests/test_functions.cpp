#include "oracles.hpp"

#include "optlab/finite_diff.hpp"
#include "optlab/functions.hpp"
#include "optlab/solvers.hpp"

#include <doctest.h>

#include <set>

using namespace optlab;

namespace {

bool outside_structure(const FunctionSpec& s, Index i, Index j) {
    switch (s.structure) {
        case HessianStructure::Diagonal: return i != j;
        case HessianStructure::BlockDiagonal: return i / s.bandwidth != j / s.bandwidth;
        case HessianStructure::Banded: return std::abs(i - j) > s.bandwidth;
        case HessianStructure::Dense: return false;
    }
    return false;
}

}  // namespace

TEST_CASE("catalog contents") {
    const auto cat = catalog();
    CHECK(cat.size() >= 12);
    std::set<std::string> names;
    for (const auto& s : cat) names.insert(s.name);
    CHECK(names.size() == cat.size());
    for (const char* required : {"ExtRosenbrock", "GenRosenbrock", "ExtWhiteHolst", "ExtPenalty", "PerturbedQuadratic",
                                 "Raydan1", "Raydan2", "Diagonal1", "ExtTridiagonal1", "ExtHimmelblau", "QuadraticQF1",
                                 "ExtPowell"})
        CHECK_MESSAGE(names.count(required) == 1, required);
    CHECK(function_spec("ExtRosenbrock").dimension_constraint() == "even");
    CHECK(function_spec("GenRosenbrock").dimension_constraint() == "any");
    CHECK(function_spec("ExtPowell").dimension_constraint() == "multiple of 4");
    for (std::size_t i = 1; i < cat.size(); ++i) CHECK(cat[i - 1].name < cat[i].name);
}

TEST_CASE("starting points") {
    for (const auto& s : catalog()) {
        CAPTURE(s.name);
        CHECK(s.admits(s.minDimension));
        CHECK(s.startingPoint(s.minDimension).size() == s.minDimension);
        const Vector a = starting_point(s.name, 2 * s.minDimension);
        CHECK(a == starting_point(s.name, 2 * s.minDimension));
        if (s.startingPoint.prefixStable) {
            const Vector small = starting_point(s.name, s.minDimension);
            CHECK(a.head(s.minDimension) == small);
        }
    }
    Vector expected(4);
    expected << -1.2, 1, -1.2, 1;
    CHECK(starting_point("ExtRosenbrock", 4) == expected);
    CHECK(evaluate_catalog_function("ExtRosenbrock", expected, EvalRequest::Value()).value.value() ==
          doctest::Approx(2 * 24.2).epsilon(1e-14));
    CHECK(rules::constant(1.0)(3) == Vector::Ones(3));
    try {
        starting_point("ExtRosenbrock", 3);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
    try {
        starting_point("Nope", 3);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownFunction);
    }
}

TEST_CASE("known minima") {
    CHECK(evaluate_catalog_function("ExtRosenbrock", Vector::Ones(6), EvalRequest::Value()).value.value() == 0.0);
    CHECK(evaluate_catalog_function("GenRosenbrock", Vector::Ones(5), EvalRequest::Value()).value.value() == 0.0);
    for (const auto& s : catalog()) {
        if (!s.knownMinimum) continue;
        const Index n = s.admissible_at_least(4);
        const Objective f = make_objective(s.name, n);
        SolverConfig cfg;
        cfg.methodName = "BFGS";
        cfg.stopping.epsilon = 1e-8;
        const SolveReport r = solve(f, starting_point(s.name, n), cfg);
        CAPTURE(s.name);
        CHECK(r.fmin == doctest::Approx(*s.knownMinimum).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("derivatives match finite differences at 20 random points") {
    std::mt19937_64 rng(42);
    for (const auto& s : catalog()) {
        const Index n = s.admissible_at_least(4);
        const Objective f = make_objective(s.name, n);
        for (int k = 0; k < 20; ++k) {
            const Vector x = oracle::random_vector(rng, n, -2.0, 2.0);
            const EvalResult r = f.raw(x, EvalRequest::All());
            const Vector gf = finite_diff_gradient(f, x, 1e-6);
            CAPTURE(s.name);
            CHECK((*r.gradient - gf).norm() / std::max(1.0, r.gradient->norm()) <= 1e-5);
            const Matrix Hf = finite_diff_hessian(f, x, 1e-4);
            CHECK((*r.hessian - Hf).cwiseAbs().maxCoeff() <= 1e-3);
            CHECK((*r.hessian - r.hessian->transpose()).norm() <= 1e-12 * std::max(1.0, r.hessian->norm()));
        }
    }
}

TEST_CASE("Hessian structure at 5 random points") {
    std::mt19937_64 rng(7);
    for (const auto& s : catalog()) {
        const Index n = s.admissible_at_least(8);
        const Objective f = make_objective(s.name, n);
        for (int k = 0; k < 5; ++k) {
            const Vector x = oracle::random_vector(rng, n, -2.0, 2.0);
            const Matrix H = *f.raw(x, EvalRequest::Hessian()).hessian;
            const Matrix Hf = finite_diff_hessian(f, x, 1e-4);
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j)
                    if (outside_structure(s, i, j)) {
                        CAPTURE(s.name);
                        CHECK(H(i, j) == 0.0);
                        CHECK(std::abs(Hf(i, j)) <= 1e-3);
                    }
        }
    }
    CHECK(function_spec("ExtRosenbrock").structure == HessianStructure::BlockDiagonal);
    CHECK(function_spec("ExtRosenbrock").bandwidth == 2);
    CHECK(function_spec("GenRosenbrock").structure == HessianStructure::Banded);
    CHECK(function_spec("GenRosenbrock").bandwidth == 1);
}

TEST_CASE("evaluate_catalog_function returns only what was asked") {
    const EvalResult r = evaluate_catalog_function("Raydan1", Vector::Ones(3), EvalRequest::Gradient());
    CHECK_FALSE(r.value);
    CHECK(r.gradient);
    CHECK_FALSE(r.hessian);
    try {
        evaluate_catalog_function("ExtRosenbrock", Vector::Ones(3), EvalRequest::Value());
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("default dimensions") {
    CHECK(default_dimension(function_spec("ExtRosenbrock"), false) == 100);
    CHECK(default_dimension(function_spec("ExtRosenbrock"), true) == 10);
    CHECK(default_dimension(function_spec("ExtPowell"), true) == 12);
}

TEST_CASE("register_function") {
    FunctionSpec spec;
    spec.name = "MyQuad";
    spec.minDimension = 1;
    spec.structure = HessianStructure::Diagonal;
    spec.startingPoint = rules::constant(3.0);
    spec.knownMinimum = 0.0;
    spec.formula = "sum x_i^2";
    register_function(spec, [](const Vector& x, const EvalRequest& r) {
        EvalResult out;
        if (r.value) out.value = x.squaredNorm();
        if (r.gradient) out.gradient = 2.0 * x;
        if (r.hessian) out.hessian = 2.0 * Matrix::Identity(x.size(), x.size());
        return out;
    });
    bool found = false;
    for (const auto& s : catalog()) found |= s.name == "MyQuad";
    CHECK(found);
    try {
        register_function(spec, [](const Vector&, const EvalRequest&) { return EvalResult{}; });
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateName);
    }

    SolverConfig cfg;
    cfg.methodName = "GradientDescent";
    const SolveReport r = solve(make_objective("MyQuad", 5), starting_point("MyQuad", 5), cfg);
    CHECK(r.terminationReason == TerminationReason::GradientTolerance);
    CHECK(r.fmin <= 1e-12);
}
