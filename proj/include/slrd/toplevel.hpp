#pragma once

#include <set>
#include <vector>

#include "slrd/ast.hpp"
#include "slrd/semantics.hpp"
#include "slrd/state.hpp"
#include "slrd/unfolding.hpp"

namespace slrd {

/// The basic part of `formula` together with the characteristic formula of
/// trees[j] placed at position [j] and the equalities binding the j-th
/// occurrence's arguments to that tree's root parameters. Logical variables
/// outside `keepFree` are existentially bound.
BasicFormula combineTopLevel(const TopLevelFormula& formula, const std::vector<const UnfoldingTree*>& trees,
                             const RecursiveSystem& system, const std::set<Variable>& keepFree = {});

/// S, interp |= formula. Free logical variables missing from `interp` are
/// read existentially. Requires every rule of the system to satisfy progress.
bool checkTopLevel(const State& state, const TopLevelFormula& formula, const RecursiveSystem& system,
                   const Interpretation& interp = {});

/// Calls f(sizes) for every way of writing `total` as an ordered sum of `parts` positive sizes.
template <typename F>
bool forEachComposition(std::size_t total, std::size_t parts, F&& f) {
    std::vector<std::size_t> sizes(parts);
    auto rec = [&](auto&& self, std::size_t i, std::size_t left) -> bool {
        if (i + 1 == parts) {
            sizes[i] = left;
            return f(static_cast<const std::vector<std::size_t>&>(sizes));
        }
        for (std::size_t s = 1; s + (parts - i - 1) <= left; ++s) {
            sizes[i] = s;
            if (self(self, i + 1, left - s)) return true;
        }
        return false;
    };
    if (parts == 0) return total == 0 && f(static_cast<const std::vector<std::size_t>&>(sizes));
    if (total < parts) return false;
    return rec(rec, 0, total);
}

}  // namespace slrd
