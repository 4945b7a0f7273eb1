#include "slrd/unfolding.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <json.hpp>

namespace slrd {

std::optional<std::size_t> UnfoldingTree::find(const TreePosition& pos) const {
    std::size_t cur = 0;
    for (int d : pos) {
        if (d < 0 || static_cast<std::size_t>(d) >= nodes[cur].children.size()) return std::nullopt;
        cur = nodes[cur].children[d];
    }
    return cur;
}

std::vector<std::size_t> UnfoldingTree::ruleSequence() const {
    std::vector<std::size_t> out;
    for (const auto& n : nodes) out.push_back(n.rule);
    return out;
}

UnfoldingTree makeTree(const RecursiveSystem& system, std::size_t predicate, const TreeShape& shape) {
    struct Pending {
        const TreeShape* shape;
        std::size_t predicate;
        TreePosition position;
        int parent;
        int direction;
    };
    UnfoldingTree tree;
    std::deque<Pending> queue{{&shape, predicate, {}, -1, -1}};
    while (!queue.empty()) {
        auto item = std::move(queue.front());
        queue.pop_front();
        const auto& rule = system.rule(item.predicate, item.shape->rule);
        if (rule.tail.size() != item.shape->children.size())
            throw Error("tree node for " + system.predicate(item.predicate).name + "/R" +
                        std::to_string(item.shape->rule + 1) + " needs " + std::to_string(rule.tail.size()) +
                        " children");
        auto index = tree.nodes.size();
        tree.nodes.push_back({item.predicate, item.shape->rule, item.position, item.parent, item.direction, {}});
        if (item.parent >= 0) tree.nodes[item.parent].children.push_back(index);
        for (std::size_t j = 0; j < rule.tail.size(); ++j) {
            auto pos = item.position;
            pos.push_back(static_cast<int>(j));
            queue.push_back({&item.shape->children[j], rule.tail[j].predicate, std::move(pos),
                             static_cast<int>(index), static_cast<int>(j)});
        }
    }
    return tree;
}

namespace {

class ShapeEnumerator {
public:
    explicit ShapeEnumerator(const RecursiveSystem& system) : system_(system) {}

    const std::vector<TreeShape>& shapes(std::size_t pred, std::size_t n) {
        auto key = std::make_pair(pred, n);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        std::vector<TreeShape> out;
        const auto& rules = system_.predicate(pred).rules;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            const auto& tail = rules[r].tail;
            if (tail.empty()) {
                if (n == 1) out.push_back({r, {}});
                continue;
            }
            if (n < tail.size() + 1) continue;
            std::vector<std::size_t> sizes(tail.size());
            std::function<void(std::size_t, std::size_t)> split = [&](std::size_t i, std::size_t left) {
                if (i + 1 == tail.size()) {
                    sizes[i] = left;
                    product(r, tail, sizes, out);
                    return;
                }
                for (std::size_t s = 1; s + (tail.size() - i - 1) <= left; ++s) {
                    sizes[i] = s;
                    split(i + 1, left - s);
                }
            };
            split(0, n - 1);
        }
        return memo_[key] = std::move(out);
    }

private:
    void product(std::size_t rule, const std::vector<PredicateOccurrence>& tail, const std::vector<std::size_t>& sizes,
                 std::vector<TreeShape>& out) {
        std::vector<const std::vector<TreeShape>*> options;
        for (std::size_t j = 0; j < tail.size(); ++j) {
            options.push_back(&shapes(tail[j].predicate, sizes[j]));
            if (options.back()->empty()) return;
        }
        std::vector<std::size_t> pick(tail.size(), 0);
        while (true) {
            TreeShape shape{rule, {}};
            for (std::size_t j = 0; j < tail.size(); ++j) shape.children.push_back((*options[j])[pick[j]]);
            out.push_back(std::move(shape));
            std::size_t j = tail.size();
            while (j > 0) {
                --j;
                if (++pick[j] < options[j]->size()) break;
                pick[j] = 0;
                if (j == 0) return;
            }
        }
    }

    const RecursiveSystem& system_;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<TreeShape>> memo_;
};

}  // namespace

std::vector<UnfoldingTree> treesOfSize(const RecursiveSystem& system, std::size_t predicate, std::size_t nodes) {
    std::vector<UnfoldingTree> out;
    if (nodes == 0) return out;
    ShapeEnumerator shapes(system);
    for (const auto& shape : shapes.shapes(predicate, nodes)) out.push_back(makeTree(system, predicate, shape));
    std::sort(out.begin(), out.end(),
              [](const UnfoldingTree& a, const UnfoldingTree& b) { return a.ruleSequence() < b.ruleSequence(); });
    return out;
}

std::vector<UnfoldingTree> enumerateTrees(const RecursiveSystem& system, std::size_t predicate, std::size_t maxNodes) {
    std::vector<UnfoldingTree> out;
    for (std::size_t n = 1; n <= maxNodes; ++n) {
        auto batch = treesOfSize(system, predicate, n);
        std::move(batch.begin(), batch.end(), std::back_inserter(out));
    }
    return out;
}

std::vector<Variable> rootParameters(const RecursiveSystem& system, std::size_t predicate, const TreePosition& prefix) {
    std::vector<Variable> out;
    for (const auto& x : system.predicate(predicate).parameters) out.push_back(x.indexed(prefix));
    return out;
}

BasicFormula characteristicFormula(const UnfoldingTree& tree, const RecursiveSystem& system,
                                   const TreePosition& prefix) {
    BasicFormula phi;
    auto roots = rootParameters(system, tree.root().predicate, prefix);
    std::set<Variable> free(roots.begin(), roots.end());
    std::set<Variable> seen;
    auto at = [&](const Variable& v, const TreePosition& pos) {
        auto out = v.indexed(pos);
        if (!out.isNil() && !free.count(out) && seen.insert(out).second) phi.bound.push_back(out);
        return out;
    };
    for (const auto& node : tree.nodes) {
        TreePosition pos = prefix;
        pos.insert(pos.end(), node.position.begin(), node.position.end());
        const auto& rule = system.rule(node.predicate, node.rule);
        for (const auto& v : rule.variables()) at(v, pos);
        for (const auto& atom : rule.head.atoms) {
            PointsTo indexed{at(atom.source, pos), {}};
            for (const auto& t : atom.targets) indexed.targets.push_back(at(t, pos));
            phi.spatial.atoms.push_back(std::move(indexed));
        }
        for (const auto& [a, b] : rule.pure.equalities) phi.pure.addEquality(at(a, pos), at(b, pos));
        for (const auto& [a, b] : rule.pure.disequalities) phi.pure.addDisequality(at(a, pos), at(b, pos));
        for (std::size_t j = 0; j < rule.tail.size(); ++j) {
            auto childPos = pos;
            childPos.push_back(static_cast<int>(j));
            const auto& occ = rule.tail[j];
            const auto& formals = system.predicate(occ.predicate).parameters;
            for (std::size_t k = 0; k < occ.args.size(); ++k)
                phi.pure.addEquality(at(occ.args[k], pos), at(formals[k], childPos));
        }
    }
    return phi;
}

bool EqualityClasses::same(const Variable& a, const Variable& b) const {
    auto x = classOf.find(a);
    auto y = classOf.find(b);
    if (x == classOf.end() || y == classOf.end()) return a == b;
    return x->second == y->second;
}

EqualityClasses equalityClosure(const UnfoldingTree& tree, const RecursiveSystem& system) {
    auto phi = characteristicFormula(tree, system);
    auto vars = variablesOf(phi);
    vars.insert(Variable::nil());
    std::vector<Variable> index(vars.begin(), vars.end());
    std::map<Variable, std::size_t> id;
    for (std::size_t i = 0; i < index.size(); ++i) id[index[i]] = i;
    UnionFind uf(index.size());
    for (const auto& [a, b] : phi.pure.equalities) uf.unite(id.at(a), id.at(b));

    EqualityClasses out;
    std::map<std::size_t, std::size_t> rootToClass;
    for (std::size_t i = 0; i < index.size(); ++i) {
        auto [it, fresh] = rootToClass.emplace(uf.find(i), out.classes.size());
        if (fresh) out.classes.emplace_back();
        out.classes[it->second].push_back(index[i]);
        out.classOf[index[i]] = it->second;
    }
    return out;
}

BuiltModel buildModel(const UnfoldingTree& tree, const RecursiveSystem& system,
                      const std::optional<std::map<std::string, Location>>& rootValuation) {
    auto phi = characteristicFormula(tree, system);
    if (rootValuation) {
        const auto& params = system.predicate(tree.root().predicate).parameters;
        std::map<Location, Variable> firstAt;
        for (const auto& x : params) {
            auto it = rootValuation->find(x.name);
            if (it == rootValuation->end()) continue;
            auto xe = x.indexed({});
            if (it->second == kNull) {
                phi.pure.addEquality(xe, Variable::nil());
                continue;
            }
            auto [slot, fresh] = firstAt.emplace(it->second, xe);
            if (!fresh) phi.pure.addEquality(slot->second, xe);
        }
    }
    BuiltModel out;
    auto sat = basicSat(phi);
    if (sat.status == SatStatus::DoubleAllocation) {
        out.status = BuildStatus::DoubleAllocation;
        return out;
    }
    if (!sat.sat()) {
        out.status = BuildStatus::Inconsistent;
        return out;
    }
    auto& model = *sat.model;
    for (const auto& node : tree.nodes) {
        const auto& head = system.rule(node.predicate, node.rule).head.atoms;
        if (head.empty()) throw Error("buildModel needs every rule to allocate a cell");
        out.mu.push_back(model.valuation.at(head.front().source.indexed(node.position)));
    }
    out.state = std::move(model.state);
    out.valuation = std::move(model.valuation);
    return out;
}

namespace {

nlohmann::ordered_json treeJson(const UnfoldingTree& tree, const RecursiveSystem& system, std::size_t i) {
    const auto& node = tree.nodes[i];
    auto out = nlohmann::ordered_json::array({system.predicate(node.predicate).name, node.rule + 1});
    for (auto c : node.children) out.push_back(treeJson(tree, system, c));
    return out;
}

std::string treeText(const UnfoldingTree& tree, const RecursiveSystem& system, std::size_t i) {
    const auto& node = tree.nodes[i];
    std::string out = system.predicate(node.predicate).name + "/R" + std::to_string(node.rule + 1);
    if (node.children.empty()) return out;
    out += "(";
    for (std::size_t k = 0; k < node.children.size(); ++k) {
        if (k) out += ", ";
        out += treeText(tree, system, node.children[k]);
    }
    return out + ")";
}

}  // namespace

std::string treeToJson(const UnfoldingTree& tree, const RecursiveSystem& system) {
    return treeJson(tree, system, 0).dump();
}

std::string treeToString(const UnfoldingTree& tree, const RecursiveSystem& system) {
    return treeText(tree, system, 0);
}

}  // namespace slrd
