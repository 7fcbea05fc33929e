#pragma once

#include "optlab/core.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace optlab {

struct MethodInfo {
    std::string group;
    std::string name;
    bool usesLineSearch = true;
    int derivativeOrder = 1;          // 1: gradient, 2: Hessian
    std::vector<std::string> extras;  // tunables accepted in SolverConfig::extras
    std::string summary;
};

/// All methods, sorted by (group, name).
const std::vector<MethodInfo>& method_registry();

/// The six group names, sorted.
std::vector<std::string> method_groups();

/// Throws Error(UnknownMethod).
const MethodInfo& method_info(std::string_view name);

}  // namespace optlab
