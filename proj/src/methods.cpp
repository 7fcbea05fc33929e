#include "optlab/methods.hpp"

#include <algorithm>

namespace optlab {

namespace {

std::vector<MethodInfo> build() {
    const std::string cg = "Conjugate Gradient", gd = "Gradient Descent", mn = "Modified Newton", nt = "Newton",
                      qn = "Quasi Newton", tr = "Trust Region";
    std::vector<MethodInfo> v = {
        {cg, "CG_DESCENT", true, 1, {}, "Hager-Zhang conjugate gradient"},
        {cg, "DaiYuan", true, 1, {}, "beta = g'g / p'y"},
        {cg, "FletcherReeves", true, 1, {}, "beta = g'g / g_prev'g_prev"},
        {cg, "HestenesStiefel", true, 1, {}, "beta = g'y / p'y"},
        {cg, "PolakRibiere", true, 1, {}, "beta = max(g'y / |g_prev|^2, 0)"},
        {gd, "BarzilaiBorwein", true, 1, {}, "two-point step size s'y / y'y"},
        {gd, "GradientDescent", true, 1, {}, "steepest descent"},
        {gd, "ScalarCorrection", true, 1, {}, "scalar-correction trial step"},
        {mn, "GoldsteinPrice", true, 2, {"eta"}, "Newton direction under an angle rule"},
        {mn, "Levenberg", true, 2, {"lambda0", "nu"}, "(G + lambda I) d = -g"},
        {mn, "LevenbergMarquardt", true, 2, {"lambda0", "nu"}, "(G + lambda diag(G)) d = -g"},
        {nt, "Newton", true, 2, {}, "G d = -g"},
        {qn, "BFGS", true, 1, {}, "inverse BFGS update"},
        {qn, "DFP", true, 1, {}, "Davidon-Fletcher-Powell update"},
        {qn, "L-BFGS", true, 1, {"lbfgsMemory"}, "limited-memory BFGS, two-loop recursion"},
        {qn, "SR1", true, 1, {}, "symmetric rank-one update"},
        {tr, "Dogleg", false, 2, {"trustRadius0", "trustRadiusMax", "eta"}, "dogleg on the exact Hessian"},
        {tr, "DoglegSR1", false, 1, {"trustRadius0", "trustRadiusMax", "eta"}, "dogleg on an SR1 model"},
    };
    std::sort(v.begin(), v.end(), [](const MethodInfo& a, const MethodInfo& b) {
        return a.group != b.group ? a.group < b.group : a.name < b.name;
    });
    return v;
}

}  // namespace

const std::vector<MethodInfo>& method_registry() {
    static const std::vector<MethodInfo> registry = build();
    return registry;
}

std::vector<std::string> method_groups() {
    std::vector<std::string> out;
    for (const auto& m : method_registry())
        if (out.empty() || out.back() != m.group) out.push_back(m.group);
    return out;
}

const MethodInfo& method_info(std::string_view name) {
    for (const auto& m : method_registry())
        if (m.name == name) return m;
    throw Error(ErrorCode::UnknownMethod, "unknown method '" + std::string(name) + "'");
}

}  // namespace optlab
