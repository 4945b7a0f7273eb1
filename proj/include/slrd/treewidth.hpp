#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slrd/ast.hpp"
#include "slrd/state.hpp"

namespace slrd {

/// Bags indexed by tree position; the positions must form a prefix-closed tree.
struct TreeDecomposition {
    std::map<TreePosition, std::set<Location>> bags;
};

struct DecompositionCheck {
    std::optional<int> width;  // set when all conditions hold
    std::string violation;

    bool ok() const { return width.has_value(); }
};

/// Undirected selector graph over loc(S) (self-loops dropped).
std::map<Location, std::set<Location>> underlyingGraph(const State& state);

DecompositionCheck validateDecomposition(const State& state, const TreeDecomposition& decomposition);

inline constexpr std::size_t kMaxExactVertices = 12;

struct TreewidthResult {
    int width = 0;
    bool exceeds = false;  // width > maxK; width still holds the exact value
    TreeDecomposition witness;
};

/// Exact treewidth by dynamic programming over elimination orders; throws
/// Error above kMaxExactVertices locations.
TreewidthResult exactTreewidth(const State& state, int maxK = static_cast<int>(kMaxExactVertices));

std::size_t treewidthBound(const BasicFormula& formula, std::size_t pvarCount);
/// Throws Error if the system is not established.
std::size_t treewidthBound(const RecursiveSystem& system);
std::size_t treewidthBound(const TopLevelFormula& formula, const RecursiveSystem& system, std::size_t pvarCount);

TreeDecomposition parseDecomposition(const std::string& text, State& state);
std::string printDecomposition(const TreeDecomposition& decomposition, const State& state);

}  // namespace slrd
