#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "slrd/ast.hpp"

namespace slrd {

struct Violation {
    std::size_t predicate = 0;
    std::size_t rule = 0;
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// (predicate, rule, tail position, callee rule) -> local selectors, all 0-based
/// except the selectors themselves which are 1..S.
using LocalSelectorKey = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;
using LocalSelectorTable = std::map<LocalSelectorKey, std::set<int>>;

/// Per predicate, the 0-based parameter positions that are allocated in every unfolding.
using AllocatedParamSets = std::vector<std::set<std::size_t>>;

std::vector<Violation> checkProgress(const RecursiveSystem& system);

LocalSelectorTable localSelectors(const RecursiveSystem& system);
std::vector<Violation> checkConnectivity(const RecursiveSystem& system);

AllocatedParamSets allocatedParameters(const RecursiveSystem& system);
std::vector<Violation> checkEstablishment(const RecursiveSystem& system);

struct WellformednessReport {
    std::vector<Violation> progress;
    bool connectivityChecked = false;
    std::vector<Violation> connectivity;
    std::vector<Violation> establishment;
    LocalSelectorTable selectors;
    AllocatedParamSets allocated;

    bool ok() const { return progress.empty() && connectivityChecked && connectivity.empty() && establishment.empty(); }
};

/// Runs all three checks; connectivity is only evaluated once progress holds.
WellformednessReport checkWellformed(const RecursiveSystem& system);

std::string reportText(const WellformednessReport& report, const RecursiveSystem& system);
std::string reportJson(const WellformednessReport& report, const RecursiveSystem& system);

}  // namespace slrd
