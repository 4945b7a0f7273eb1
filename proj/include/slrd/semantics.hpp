#pragma once

#include <map>
#include <optional>
#include <vector>

#include "slrd/ast.hpp"
#include "slrd/state.hpp"

namespace slrd {

/// Valuation of logical variables.
using Interpretation = std::map<Variable, Location>;

/// Strict-semantics model checking of a basic formula. Program variables are
/// read from the store, free logical variables from `interp`; bound variables
/// are searched for. Throws Error when a free variable has no valuation.
bool checkBasic(const State& state, const Interpretation& interp, const BasicFormula& formula);

enum class SatStatus { Sat, PureConflict, DoubleAllocation, NilAllocation };

struct CanonicalModel {
    State state;
    /// Every logical variable of the formula (bound ones included) mapped to its class location.
    Interpretation valuation;
    /// Variable -> equivalence class id (classes numbered in first-occurrence order).
    std::map<Variable, std::size_t> classOf;
    std::vector<Location> classLocation;
};

struct BasicSatResult {
    SatStatus status = SatStatus::Sat;
    std::optional<CanonicalModel> model;

    bool sat() const { return status == SatStatus::Sat; }
};

/// Decides a basic formula by equality classes and builds its most general
/// model: one location per class, cells for points-to atoms, nil's class at null.
BasicSatResult basicSat(const BasicFormula& formula);

}  // namespace slrd
