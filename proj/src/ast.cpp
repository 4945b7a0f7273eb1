#include "slrd/ast.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace slrd {

std::string positionToString(const TreePosition& pos) {
    if (pos.empty()) return "e";
    std::string out;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(pos[i]);
    }
    return out;
}

Variable Variable::indexed(const TreePosition& pos) const {
    if (isNil()) return *this;
    return {name, VarKind::Logical, pos};
}

std::string toString(const Variable& v) {
    if (!v.index) return v.name;
    std::string out = v.name + "^";
    if (v.index->empty()) return out + "e";
    for (std::size_t i = 0; i < v.index->size(); ++i) {
        if (i) out += '_';
        out += std::to_string((*v.index)[i]);
    }
    return out;
}

namespace {

VarPair ordered(const Variable& a, const Variable& b) {
    return a <= b ? VarPair{a, b} : VarPair{b, a};
}

}  // namespace

void PureFormula::addEquality(const Variable& a, const Variable& b) { equalities.insert(ordered(a, b)); }

void PureFormula::addDisequality(const Variable& a, const Variable& b) { disequalities.insert(ordered(a, b)); }

bool PureFormula::hasEquality(const Variable& a, const Variable& b) const {
    return equalities.count({a, b}) || equalities.count({b, a});
}

bool PureFormula::hasDisequality(const Variable& a, const Variable& b) const {
    return disequalities.count({a, b}) || disequalities.count({b, a});
}

std::set<Variable> PureFormula::variables() const {
    std::set<Variable> out;
    for (const auto& [a, b] : equalities) out.insert({a, b});
    for (const auto& [a, b] : disequalities) out.insert({a, b});
    return out;
}

std::vector<Variable> Rule::variables() const {
    std::vector<Variable> out = parameters;
    out.insert(out.end(), bound.begin(), bound.end());
    return out;
}

RecursiveSystem::RecursiveSystem(std::vector<Predicate> predicates, int selectorCount)
    : predicates_(std::move(predicates)), selectorCount_(selectorCount) {
    if (selectorCount_ < 1) throw Error("selector count must be positive");
    std::set<std::string> names;
    for (const auto& pred : predicates_) {
        if (!names.insert(pred.name).second) throw Error("duplicate predicate '" + pred.name + "'");
        if (pred.rules.empty()) throw Error("predicate '" + pred.name + "' has no rules");
        for (const auto& rule : pred.rules) {
            if (rule.parameters != pred.parameters)
                throw Error("rules of '" + pred.name + "' must share the predicate's parameters");
            std::set<Variable> scope(rule.parameters.begin(), rule.parameters.end());
            if (scope.size() != rule.parameters.size())
                throw Error("duplicate parameter in '" + pred.name + "'");
            for (const auto& z : rule.bound)
                if (!scope.insert(z).second)
                    throw Error("variable '" + z.name + "' of '" + pred.name + "' is bound twice");
            auto inScope = [&](const Variable& v) {
                if (!v.isNil() && !scope.count(v))
                    throw Error("variable '" + toString(v) + "' is not declared in a rule of '" + pred.name + "'");
            };
            for (const auto& atom : rule.head.atoms) {
                if (atom.source.isNil()) throw Error("nil cannot be allocated");
                if (atom.targets.empty()) throw Error("points-to atom needs at least one target");
                if (static_cast<int>(atom.targets.size()) > selectorCount_)
                    throw Error("points-to arity exceeds selector count");
                inScope(atom.source);
                for (const auto& t : atom.targets) inScope(t);
            }
            for (const auto& v : rule.pure.variables()) inScope(v);
            for (const auto& occ : rule.tail) {
                if (occ.predicate >= predicates_.size()) throw Error("undefined predicate in tail");
                if (occ.args.size() != predicates_[occ.predicate].parameters.size())
                    throw Error("arity mismatch in call to '" + predicates_[occ.predicate].name + "'");
                for (const auto& a : occ.args) {
                    if (a.isNil()) throw Error("nil cannot be passed inside a rule of '" + pred.name + "'");
                    inScope(a);
                }
            }
        }
    }
}

std::optional<std::size_t> RecursiveSystem::find(const std::string& name) const {
    for (std::size_t i = 0; i < predicates_.size(); ++i)
        if (predicates_[i].name == name) return i;
    return std::nullopt;
}

std::size_t RecursiveSystem::maxTail() const {
    std::size_t n = 0;
    for (const auto& p : predicates_)
        for (const auto& r : p.rules) n = std::max(n, r.tail.size());
    return n;
}

std::vector<int> RecursiveSystem::directions() const {
    std::vector<int> dirs;
    for (int d = -1; d < static_cast<int>(maxTail()); ++d) dirs.push_back(d);
    return dirs;
}

std::size_t RecursiveSystem::varCount() const {
    std::size_t n = 0;
    for (const auto& p : predicates_)
        for (const auto& r : p.rules) n = std::max(n, r.varCount());
    return n;
}

std::size_t RecursiveSystem::ruleCount() const {
    std::size_t n = 0;
    for (const auto& p : predicates_) n += p.rules.size();
    return n;
}

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::add() {
    parent_.push_back(parent_.size());
    rank_.push_back(0);
    return parent_.size() - 1;
}

std::size_t UnionFind::find(std::size_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
}

PureFormula pureClosure(const PureFormula& pure, const std::set<Variable>& vars) {
    std::set<Variable> all = vars;
    for (const auto& v : pure.variables()) all.insert(v);
    std::vector<Variable> index(all.begin(), all.end());
    std::map<Variable, std::size_t> id;
    for (std::size_t i = 0; i < index.size(); ++i) id[index[i]] = i;

    UnionFind uf(index.size());
    for (const auto& [a, b] : pure.equalities) uf.unite(id[a], id[b]);

    std::map<std::size_t, std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < index.size(); ++i) classes[uf.find(i)].push_back(i);

    PureFormula out;
    for (const auto& [root, members] : classes)
        for (auto a : members)
            for (auto b : members) out.equalities.insert({index[a], index[b]});
    for (const auto& [a, b] : pure.disequalities) {
        const auto& ca = classes[uf.find(id[a])];
        const auto& cb = classes[uf.find(id[b])];
        for (auto x : ca)
            for (auto y : cb) {
                out.disequalities.insert({index[x], index[y]});
                out.disequalities.insert({index[y], index[x]});
            }
    }
    return out;
}

std::size_t sigmaSize(const SpatialFormula& spatial) {
    std::size_t n = 0;
    for (const auto& atom : spatial.atoms) n += atom.targets.size() + 1;
    return n;
}

VarClassification classifyVars(const BasicFormula& formula) {
    VarClassification out;
    for (const auto& atom : formula.spatial.atoms) {
        out.allocated.insert(atom.source);
        out.referenced.insert(atom.targets.begin(), atom.targets.end());
    }
    std::set<Variable> bound(formula.bound.begin(), formula.bound.end());
    for (const auto& v : variablesOf(formula))
        if (!bound.count(v)) out.free.insert(v);
    return out;
}

std::set<Variable> variablesOf(const BasicFormula& formula) {
    std::set<Variable> out(formula.bound.begin(), formula.bound.end());
    for (const auto& atom : formula.spatial.atoms) {
        out.insert(atom.source);
        out.insert(atom.targets.begin(), atom.targets.end());
    }
    for (const auto& v : formula.pure.variables()) out.insert(v);
    return out;
}

std::set<Variable> variablesOf(const TopLevelFormula& formula) {
    std::set<Variable> out = variablesOf(formula.basic);
    out.insert(formula.bound.begin(), formula.bound.end());
    for (const auto& occ : formula.occurrences) out.insert(occ.args.begin(), occ.args.end());
    return out;
}

}  // namespace slrd
