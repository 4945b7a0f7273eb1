#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slrd/ast.hpp"
#include "slrd/semantics.hpp"
#include "slrd/state.hpp"

namespace slrd {

struct TreeNode {
    std::size_t predicate = 0;
    std::size_t rule = 0;
    TreePosition position;
    int parent = -1;     // node index, -1 at the root
    int direction = -1;  // index among the parent's children, -1 at the root
    std::vector<std::size_t> children;

    bool operator==(const TreeNode&) const = default;
};

/// An unfolding tree stored breadth-first; nodes[0] is the root.
struct UnfoldingTree {
    std::vector<TreeNode> nodes;

    std::size_t size() const { return nodes.size(); }
    const TreeNode& root() const { return nodes.front(); }
    std::optional<std::size_t> find(const TreePosition& pos) const;
    /// Rule indices in breadth-first order; determines the tree given the root predicate.
    std::vector<std::size_t> ruleSequence() const;

    bool operator==(const UnfoldingTree&) const = default;
};

/// Builds a tree from a nested (rule, children) description; children follow the rule's tail.
struct TreeShape {
    std::size_t rule = 0;
    std::vector<TreeShape> children;
};
UnfoldingTree makeTree(const RecursiveSystem& system, std::size_t predicate, const TreeShape& shape);

/// All trees of `predicate` with exactly `nodes` nodes, ordered by breadth-first rule sequence.
std::vector<UnfoldingTree> treesOfSize(const RecursiveSystem& system, std::size_t predicate, std::size_t nodes);
/// All trees with at most `maxNodes` nodes, by size and then by breadth-first rule sequence.
std::vector<UnfoldingTree> enumerateTrees(const RecursiveSystem& system, std::size_t predicate, std::size_t maxNodes);

/// Root parameters x^prefix of a tree placed at `prefix`.
std::vector<Variable> rootParameters(const RecursiveSystem& system, std::size_t predicate, const TreePosition& prefix = {});

/// phi_t with every variable indexed by prefix.p; everything but the root parameters is bound.
BasicFormula characteristicFormula(const UnfoldingTree& tree, const RecursiveSystem& system,
                                   const TreePosition& prefix = {});

struct EqualityClasses {
    std::vector<std::vector<Variable>> classes;
    std::map<Variable, std::size_t> classOf;

    bool same(const Variable& a, const Variable& b) const;
};

/// Partition of the indexed variables of phi_t and nil induced by its equalities.
EqualityClasses equalityClosure(const UnfoldingTree& tree, const RecursiveSystem& system);

enum class BuildStatus { Ok, DoubleAllocation, Inconsistent };

struct BuiltModel {
    BuildStatus status = BuildStatus::Ok;
    State state;
    Interpretation valuation;
    std::vector<Location> mu;  // node index -> allocated location

    bool ok() const { return status == BuildStatus::Ok; }
};

/// Canonical model of phi_t. `rootValuation` (keyed by the unindexed parameter
/// names) forces root parameters with equal locations together and null ones to nil.
BuiltModel buildModel(const UnfoldingTree& tree, const RecursiveSystem& system,
                      const std::optional<std::map<std::string, Location>>& rootValuation = std::nullopt);

/// [pred, rule (1-based), child, ...]
std::string treeToJson(const UnfoldingTree& tree, const RecursiveSystem& system);
/// pred/Rk(child, ...)
std::string treeToString(const UnfoldingTree& tree, const RecursiveSystem& system);

}  // namespace slrd
