#pragma once

#include <optional>
#include <vector>

#include "slrd/ast.hpp"
#include "slrd/semantics.hpp"
#include "slrd/state.hpp"
#include "slrd/unfolding.hpp"

namespace slrd {

enum class VerdictKind { Sat, UnsatUpTo, ValidUpTo, Refuted };

const char* verdictName(VerdictKind kind);

struct Verdict {
    VerdictKind kind = VerdictKind::UnsatUpTo;
    std::size_t bound = 0;
    /// Model (Sat) or counterexample (Refuted); replayed with checkTopLevel before being returned.
    std::optional<State> witness;
    /// Free logical variables of the formula (of lhs when refuting).
    Interpretation valuation;
    /// One tree per predicate occurrence, in occurrence order.
    std::vector<UnfoldingTree> trees;
    std::size_t candidates = 0;  // tree tuples examined
};

struct DecisionOptions {
    unsigned threads = 1;
};

/// Searches tuples of unfolding trees with at most `bound` nodes in total,
/// smallest first. Throws Error when the system is not well-formed.
Verdict satBounded(const TopLevelFormula& formula, const RecursiveSystem& system, std::size_t bound,
                   const DecisionOptions& options = {});

/// Model checks rhs on every lhs model found by the same search.
Verdict entail(const TopLevelFormula& lhs, const TopLevelFormula& rhs, const RecursiveSystem& system,
               std::size_t bound, const DecisionOptions& options = {});

}  // namespace slrd
