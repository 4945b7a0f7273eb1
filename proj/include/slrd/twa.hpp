#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slrd/ast.hpp"
#include "slrd/unfolding.hpp"

namespace slrd {

/// Guard on the current node's label (rule, direction) or the `root` marker.
struct LabelGuard {
    enum class Kind { Any, Rule, Root } kind = Kind::Any;
    std::size_t predicate = 0;
    std::size_t rule = 0;
    std::optional<int> direction;

    static LabelGuard any() { return {}; }
    static LabelGuard root() { return {Kind::Root, 0, 0, std::nullopt}; }
    static LabelGuard of(std::size_t p, std::size_t r, std::optional<int> dir = std::nullopt) {
        return {Kind::Rule, p, r, dir};
    }
};

/// Guard on the parent's label, or `?` (only true at the root).
struct ParentGuard {
    enum class Kind { Any, Rule, Unknown } kind = Kind::Any;
    std::size_t predicate = 0;
    std::size_t rule = 0;

    static ParentGuard any() { return {}; }
    static ParentGuard unknown() { return {Kind::Unknown, 0, 0}; }
    static ParentGuard of(std::size_t p, std::size_t r) { return {Kind::Rule, p, r}; }
};

struct Transition {
    static constexpr int kStay = -2;

    std::size_t from = 0;
    LabelGuard label;
    ParentGuard parent;
    std::size_t to = 0;
    int move = kStay;  // -1 up, k >= 0 down to child k
};

class TreeWalkingAutomaton {
public:
    std::size_t addState(const std::string& name);
    std::optional<std::size_t> state(const std::string& name) const;
    std::size_t require(const std::string& name) const;
    const std::vector<std::string>& states() const { return states_; }

    void add(std::size_t from, LabelGuard label, ParentGuard parent, std::size_t to, int move);
    const std::vector<Transition>& transitions() const { return transitions_; }
    const std::vector<std::size_t>& outgoing(std::size_t state) const { return outgoing_.at(state); }

    std::size_t initial = 0;
    std::size_t final = 0;

    std::string dump(const RecursiveSystem& system) const;

private:
    std::vector<std::string> states_;
    std::vector<Transition> transitions_;
    std::vector<std::vector<std::size_t>> outgoing_;
};

std::string varState(const std::string& name);
std::string selState(int selector);
std::string markerState(const RecursiveSystem& system, std::size_t predicate, std::size_t param);

struct Configuration {
    std::size_t node = 0;  // index into UnfoldingTree::nodes
    std::size_t state = 0;
};

/// Whether a transition may fire at `node` of `tree`.
bool guardsHold(const Transition& t, const UnfoldingTree& tree, std::size_t node);

/// Configurations reachable from `from`, flattened as node * |Q| + state.
std::vector<bool> reachableSet(const TreeWalkingAutomaton& twa, const UnfoldingTree& tree, Configuration from);
bool reachable(const TreeWalkingAutomaton& twa, const UnfoldingTree& tree, Configuration from, Configuration to);
/// Nodes r such that <r, state> is reachable from `from`.
std::vector<std::size_t> nodesInState(const TreeWalkingAutomaton& twa, const UnfoldingTree& tree, Configuration from,
                                      std::size_t state);

/// A_P: tracks selector targets to the position allocating them.
TreeWalkingAutomaton buildRoutingAutomaton(const RecursiveSystem& system);
/// B_P: tracks the allocated variable of a chosen position.
TreeWalkingAutomaton buildDoubleAllocAutomaton(const RecursiveSystem& system);
/// C^{i,j}_c for c = 1 (allocated), 2 (referenced), 3 (equal to another parameter).
std::vector<TreeWalkingAutomaton> buildParamAutomata(const RecursiveSystem& system, std::size_t predicate,
                                                    std::size_t param);

/// Some run of B_P starts q_0 at one position and ends in q_f at another.
bool hasNontrivialDoubleAllocRun(const TreeWalkingAutomaton& b, const UnfoldingTree& tree);

}  // namespace slrd
