#include "slrd/twa.hpp"

#include <deque>

namespace slrd {

std::size_t TreeWalkingAutomaton::addState(const std::string& name) {
    if (auto s = state(name)) return *s;
    states_.push_back(name);
    outgoing_.emplace_back();
    return states_.size() - 1;
}

std::optional<std::size_t> TreeWalkingAutomaton::state(const std::string& name) const {
    for (std::size_t i = 0; i < states_.size(); ++i)
        if (states_[i] == name) return i;
    return std::nullopt;
}

std::size_t TreeWalkingAutomaton::require(const std::string& name) const {
    auto s = state(name);
    if (!s) throw Error("automaton has no state " + name);
    return *s;
}

void TreeWalkingAutomaton::add(std::size_t from, LabelGuard label, ParentGuard parent, std::size_t to, int move) {
    if (from >= states_.size() || to >= states_.size()) throw Error("transition mentions an undeclared state");
    if (move < Transition::kStay) throw Error("invalid move");
    outgoing_[from].push_back(transitions_.size());
    transitions_.push_back({from, label, parent, to, move});
}

std::string TreeWalkingAutomaton::dump(const RecursiveSystem& system) const {
    auto rule = [&](std::size_t p, std::size_t r) { return system.predicate(p).name + "/R" + std::to_string(r + 1); };
    std::string out = "states:";
    for (const auto& s : states_) out += " " + s;
    out += "\ninitial: " + states_.at(initial) + "\nfinal: " + states_.at(final) + "\ntransitions:\n";
    for (const auto& t : transitions_) {
        std::string label = "*";
        if (t.label.kind == LabelGuard::Kind::Root) label = "root";
        if (t.label.kind == LabelGuard::Kind::Rule)
            label = rule(t.label.predicate, t.label.rule) + "^" +
                    (t.label.direction ? std::to_string(*t.label.direction) : std::string("*"));
        std::string parent = "*";
        if (t.parent.kind == ParentGuard::Kind::Unknown) parent = "?";
        if (t.parent.kind == ParentGuard::Kind::Rule) parent = rule(t.parent.predicate, t.parent.rule);
        std::string move = t.move == Transition::kStay ? "stay" : t.move == -1 ? "up" : "down " + std::to_string(t.move);
        out += "  " + states_[t.from] + " [" + label + ", " + parent + "] -> " + states_[t.to] + " " + move + "\n";
    }
    return out;
}

std::string varState(const std::string& name) { return "q^var_" + name; }
std::string selState(int selector) { return "q^sel_" + std::to_string(selector); }
std::string markerState(const RecursiveSystem& system, std::size_t predicate, std::size_t param) {
    return "q^{" + system.predicate(predicate).name + "," + std::to_string(param + 1) + "}";
}

bool guardsHold(const Transition& t, const UnfoldingTree& tree, std::size_t node) {
    const auto& n = tree.nodes[node];
    bool isRoot = n.parent < 0;
    switch (t.label.kind) {
        case LabelGuard::Kind::Any:
            break;
        case LabelGuard::Kind::Root:
            if (!isRoot) return false;
            break;
        case LabelGuard::Kind::Rule:
            if (n.predicate != t.label.predicate || n.rule != t.label.rule) return false;
            if (t.label.direction && *t.label.direction != n.direction) return false;
            break;
    }
    switch (t.parent.kind) {
        case ParentGuard::Kind::Any:
            return true;
        case ParentGuard::Kind::Unknown:
            return isRoot;
        case ParentGuard::Kind::Rule: {
            if (isRoot) return false;
            const auto& p = tree.nodes[n.parent];
            return p.predicate == t.parent.predicate && p.rule == t.parent.rule;
        }
    }
    return false;
}

std::vector<bool> reachableSet(const TreeWalkingAutomaton& twa, const UnfoldingTree& tree, Configuration from) {
    const std::size_t q = twa.states().size();
    std::vector<bool> seen(tree.size() * q, false);
    std::deque<Configuration> queue{from};
    seen[from.node * q + from.state] = true;
    while (!queue.empty()) {
        auto c = queue.front();
        queue.pop_front();
        for (auto ti : twa.outgoing(c.state)) {
            const auto& t = twa.transitions()[ti];
            if (!guardsHold(t, tree, c.node)) continue;
            std::size_t next = c.node;
            const auto& n = tree.nodes[c.node];
            if (t.move == -1) {
                if (n.parent < 0) continue;
                next = static_cast<std::size_t>(n.parent);
            } else if (t.move >= 0) {
                if (static_cast<std::size_t>(t.move) >= n.children.size()) continue;
                next = n.children[t.move];
            }
            auto key = next * q + t.to;
            if (seen[key]) continue;
            seen[key] = true;
            queue.push_back({next, t.to});
        }
    }
    return seen;
}

bool reachable(const TreeWalkingAutomaton& twa, const UnfoldingTree& tree, Configuration from, Configuration to) {
    return reachableSet(twa, tree, from)[to.node * twa.states().size() + to.state];
}

std::vector<std::size_t> nodesInState(const TreeWalkingAutomaton& twa, const UnfoldingTree& tree, Configuration from,
                                      std::size_t state) {
    auto seen = reachableSet(twa, tree, from);
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < tree.size(); ++n)
        if (seen[n * twa.states().size() + state]) out.push_back(n);
    return out;
}

namespace {

void addVarStates(TreeWalkingAutomaton& a, const RecursiveSystem& system) {
    bool nil = false;
    for (const auto& pred : system.predicates())
        for (const auto& rule : pred.rules) {
            for (const auto& v : rule.variables()) a.addState(varState(v.name));
            for (const auto& atom : rule.head.atoms)
                for (const auto& t : atom.targets) nil = nil || t.isNil();
            for (const auto& v : rule.pure.variables()) nil = nil || v.isNil();
        }
    if (nil) a.addState(varState("nil"));
}

void addSelStates(TreeWalkingAutomaton& a, const RecursiveSystem& system) {
    for (int s = 1; s <= system.selectorCount(); ++s) a.addState(selState(s));
}

template <typename F>
void forEachRule(const RecursiveSystem& system, F&& f) {
    for (std::size_t p = 0; p < system.predicates().size(); ++p)
        for (std::size_t r = 0; r < system.predicate(p).rules.size(); ++r) f(p, r, system.rule(p, r));
}

/// Parameter passing between a node and its children.
void addPassing(TreeWalkingAutomaton& a, const RecursiveSystem& system) {
    forEachRule(system, [&](std::size_t p, std::size_t r, const Rule& rule) {
        for (std::size_t k = 0; k < rule.tail.size(); ++k) {
            const auto& occ = rule.tail[k];
            const auto& callee = system.predicate(occ.predicate);
            for (std::size_t m = 0; m < occ.args.size(); ++m) {
                auto y = a.require(varState(occ.args[m].name));
                auto x = a.require(varState(callee.parameters[m].name));
                a.add(y, LabelGuard::of(p, r), ParentGuard::any(), x, static_cast<int>(k));
                for (std::size_t q = 0; q < callee.rules.size(); ++q)
                    a.add(x, LabelGuard::of(occ.predicate, q, static_cast<int>(k)), ParentGuard::of(p, r), y, -1);
            }
        }
    });
}

/// Switching along equalities of the current rule.
void addEqualities(TreeWalkingAutomaton& a, const RecursiveSystem& system) {
    forEachRule(system, [&](std::size_t p, std::size_t r, const Rule& rule) {
        for (const auto& [x, y] : rule.pure.equalities) {
            auto sx = a.require(varState(x.name));
            auto sy = a.require(varState(y.name));
            a.add(sx, LabelGuard::of(p, r), ParentGuard::any(), sy, Transition::kStay);
            if (sx != sy) a.add(sy, LabelGuard::of(p, r), ParentGuard::any(), sx, Transition::kStay);
        }
    });
}

void addAllocationFinal(TreeWalkingAutomaton& a, const RecursiveSystem& system) {
    forEachRule(system, [&](std::size_t p, std::size_t r, const Rule& rule) {
        for (const auto& atom : rule.head.atoms)
            a.add(a.require(varState(atom.source.name)), LabelGuard::of(p, r), ParentGuard::any(), a.final,
                  Transition::kStay);
    });
}

void addWandering(TreeWalkingAutomaton& a, const RecursiveSystem& system) {
    for (std::size_t k = 0; k < system.maxTail(); ++k)
        a.add(a.initial, LabelGuard::any(), ParentGuard::any(), a.initial, static_cast<int>(k));
}

}  // namespace

TreeWalkingAutomaton buildRoutingAutomaton(const RecursiveSystem& system) {
    TreeWalkingAutomaton a;
    a.initial = a.addState("q_i");
    a.final = a.addState("q_f");
    addSelStates(a, system);
    addVarStates(a, system);

    addWandering(a, system);
    for (int s = 1; s <= system.selectorCount(); ++s)
        a.add(a.initial, LabelGuard::any(), ParentGuard::any(), a.require(selState(s)), Transition::kStay);
    forEachRule(system, [&](std::size_t p, std::size_t r, const Rule& rule) {
        for (const auto& atom : rule.head.atoms)
            for (std::size_t s = 0; s < atom.targets.size(); ++s)
                a.add(a.require(selState(static_cast<int>(s + 1))), LabelGuard::of(p, r), ParentGuard::any(),
                      a.require(varState(atom.targets[s].name)), Transition::kStay);
    });
    addAllocationFinal(a, system);
    addPassing(a, system);
    addEqualities(a, system);
    return a;
}

TreeWalkingAutomaton buildDoubleAllocAutomaton(const RecursiveSystem& system) {
    TreeWalkingAutomaton b;
    b.initial = b.addState("q_i");
    b.final = b.addState("q_f");
    auto q0 = b.addState("q_0");
    addVarStates(b, system);

    addWandering(b, system);
    b.add(b.initial, LabelGuard::any(), ParentGuard::any(), q0, Transition::kStay);
    forEachRule(system, [&](std::size_t p, std::size_t r, const Rule& rule) {
        for (const auto& atom : rule.head.atoms)
            b.add(q0, LabelGuard::of(p, r), ParentGuard::any(), b.require(varState(atom.source.name)),
                  Transition::kStay);
    });
    addAllocationFinal(b, system);
    addPassing(b, system);
    addEqualities(b, system);
    return b;
}

std::vector<TreeWalkingAutomaton> buildParamAutomata(const RecursiveSystem& system, std::size_t predicate,
                                                    std::size_t param) {
    const auto& pred = system.predicate(predicate);
    if (param >= pred.arity()) throw Error("parameter index out of range");
    std::vector<TreeWalkingAutomaton> out;
    for (int c = 1; c <= 3; ++c) {
        TreeWalkingAutomaton a;
        a.initial = a.addState("q_i");
        a.final = a.addState("q_f");
        addSelStates(a, system);
        for (std::size_t k = 0; k < pred.arity(); ++k) a.addState(markerState(system, predicate, k));
        addVarStates(a, system);

        auto start = a.require(markerState(system, predicate, param));
        a.add(a.initial, LabelGuard::root(), ParentGuard::unknown(), start, Transition::kStay);
        auto tracked = a.require(varState(pred.parameters[param].name));
        for (std::size_t r = 0; r < pred.rules.size(); ++r)
            a.add(start, LabelGuard::of(predicate, r, -1), ParentGuard::unknown(), tracked, Transition::kStay);
        addPassing(a, system);
        addEqualities(a, system);

        if (c == 1) addAllocationFinal(a, system);
        if (c == 2) {
            forEachRule(system, [&](std::size_t p, std::size_t r, const Rule& rule) {
                for (const auto& atom : rule.head.atoms)
                    for (std::size_t s = 0; s < atom.targets.size(); ++s)
                        a.add(a.require(varState(atom.targets[s].name)), LabelGuard::of(p, r), ParentGuard::any(),
                              a.require(selState(static_cast<int>(s + 1))), Transition::kStay);
            });
            for (int s = 1; s <= system.selectorCount(); ++s)
                a.add(a.require(selState(s)), LabelGuard::any(), ParentGuard::any(), a.final, Transition::kStay);
        }
        if (c == 3) {
            for (std::size_t k = 0; k < pred.arity(); ++k) {
                if (k == param) continue;
                auto marker = a.require(markerState(system, predicate, k));
                a.add(a.require(varState(pred.parameters[k].name)), LabelGuard::root(), ParentGuard::unknown(), marker,
                      Transition::kStay);
                a.add(marker, LabelGuard::root(), ParentGuard::unknown(), a.final, Transition::kStay);
            }
        }
        out.push_back(std::move(a));
    }
    return out;
}

bool hasNontrivialDoubleAllocRun(const TreeWalkingAutomaton& b, const UnfoldingTree& tree) {
    auto q0 = b.require("q_0");
    for (std::size_t p = 0; p < tree.size(); ++p) {
        // q_i can walk from the root to every position before entering q_0.
        for (auto r : nodesInState(b, tree, {p, q0}, b.final))
            if (r != p) return true;
    }
    return false;
}

}  // namespace slrd
