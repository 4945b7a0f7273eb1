#include "slrd/semantics.hpp"

#include <algorithm>

namespace slrd {

namespace {

/// Variables of a basic formula numbered in first-occurrence order.
struct VarTable {
    std::vector<Variable> vars;
    std::map<Variable, std::size_t> id;

    std::size_t intern(const Variable& v) {
        auto [it, fresh] = id.emplace(v, vars.size());
        if (fresh) vars.push_back(v);
        return it->second;
    }

    explicit VarTable(const BasicFormula& f) {
        for (const auto& atom : f.spatial.atoms) {
            intern(atom.source);
            for (const auto& t : atom.targets) intern(t);
        }
        for (const auto& [a, b] : f.pure.equalities) {
            intern(a);
            intern(b);
        }
        for (const auto& [a, b] : f.pure.disequalities) {
            intern(a);
            intern(b);
        }
        for (const auto& v : f.bound) intern(v);
    }
};

struct AtomShape {
    std::size_t source;
    std::vector<std::size_t> targets;
};

/// Backtracking matcher of points-to atoms against heap cells.
class Matcher {
public:
    Matcher(const State& state, std::vector<AtomShape> atoms, std::vector<std::pair<std::size_t, std::size_t>> diseqs)
        : state_(state), atoms_(std::move(atoms)), diseqs_(std::move(diseqs)) {
        for (const auto& [l, cell] : state.heap) cells_.push_back(l);
    }

    bool solve(std::vector<std::optional<Location>> assign) {
        if (atoms_.size() != cells_.size()) return false;
        std::vector<bool> matched(atoms_.size(), false);
        std::vector<bool> used(cells_.size(), false);
        return search(assign, matched, used, 0);
    }

private:
    bool search(std::vector<std::optional<Location>>& assign, std::vector<bool>& matched, std::vector<bool>& used,
                std::size_t done) {
        if (done == atoms_.size()) return diseqsHold(assign);
        std::size_t pick = atoms_.size();
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (!matched[i] && assign[atoms_[i].source]) {
                pick = i;
                break;
            }
        if (pick < atoms_.size()) {
            Location l = *assign[atoms_[pick].source];
            auto cellIdx = cellIndex(l);
            if (!cellIdx || used[*cellIdx]) return false;
            auto saved = assign;
            if (!bindTargets(pick, l, assign)) {
                assign = saved;
                return false;
            }
            matched[pick] = true;
            used[*cellIdx] = true;
            bool ok = search(assign, matched, used, done + 1);
            matched[pick] = false;
            used[*cellIdx] = false;
            if (!ok) assign = saved;
            return ok;
        }
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (matched[i]) continue;
            for (std::size_t c = 0; c < cells_.size(); ++c) {
                if (used[c]) continue;
                auto saved = assign;
                assign[atoms_[i].source] = cells_[c];
                if (search(assign, matched, used, done)) return true;
                assign = saved;
            }
            return false;
        }
        return false;
    }

    std::optional<std::size_t> cellIndex(Location l) const {
        auto it = std::lower_bound(cells_.begin(), cells_.end(), l);
        if (it == cells_.end() || *it != l) return std::nullopt;
        return static_cast<std::size_t>(it - cells_.begin());
    }

    bool bindTargets(std::size_t atom, Location l, std::vector<std::optional<Location>>& assign) const {
        const auto& cell = state_.heap.at(l);
        const auto& targets = atoms_[atom].targets;
        if (cell.size() != targets.size()) return false;
        for (std::size_t k = 0; k < targets.size(); ++k) {
            auto e = cell.find(static_cast<int>(k + 1));
            if (e == cell.end()) return false;
            auto& slot = assign[targets[k]];
            if (slot && *slot != e->second) return false;
            slot = e->second;
        }
        return true;
    }

    bool diseqsHold(const std::vector<std::optional<Location>>& assign) const {
        // Unassigned classes are existential and can take fresh, pairwise distinct values.
        for (const auto& [a, b] : diseqs_) {
            if (a == b) return false;
            if (assign[a] && assign[b] && *assign[a] == *assign[b]) return false;
        }
        return true;
    }

    const State& state_;
    std::vector<AtomShape> atoms_;
    std::vector<std::pair<std::size_t, std::size_t>> diseqs_;
    std::vector<Location> cells_;
};

}  // namespace

bool checkBasic(const State& state, const Interpretation& interp, const BasicFormula& formula) {
    VarTable table(formula);
    std::size_t nilId = table.intern(Variable::nil());
    for (const auto& v : variablesOf(formula)) table.intern(v);

    UnionFind uf(table.vars.size());
    for (const auto& [a, b] : formula.pure.equalities) uf.unite(table.id.at(a), table.id.at(b));

    std::vector<std::optional<Location>> assign(table.vars.size());
    auto fix = [&](std::size_t var, Location l) {
        auto& slot = assign[uf.find(var)];
        if (slot && *slot != l) return false;
        slot = l;
        return true;
    };
    if (!fix(nilId, kNull)) return false;

    std::set<Variable> bound(formula.bound.begin(), formula.bound.end());
    bool consistent = true;
    for (std::size_t i = 0; i < table.vars.size(); ++i) {
        const auto& v = table.vars[i];
        if (v.isNil() || bound.count(v)) continue;
        std::optional<Location> value;
        if (v.kind == VarKind::Program) {
            value = state.lookup(v.name);
            if (!value) throw Error("program variable '" + v.name + "' is not in the store");
        } else {
            auto it = interp.find(v);
            if (it == interp.end()) throw Error("free variable '" + toString(v) + "' has no valuation");
            value = it->second;
        }
        consistent = fix(i, *value) && consistent;
    }
    if (!consistent) return false;

    std::vector<AtomShape> atoms;
    for (const auto& atom : formula.spatial.atoms) {
        AtomShape shape{uf.find(table.id.at(atom.source)), {}};
        for (const auto& t : atom.targets) shape.targets.push_back(uf.find(table.id.at(t)));
        atoms.push_back(std::move(shape));
    }
    std::vector<std::pair<std::size_t, std::size_t>> diseqs;
    for (const auto& [a, b] : formula.pure.disequalities)
        diseqs.emplace_back(uf.find(table.id.at(a)), uf.find(table.id.at(b)));

    return Matcher(state, std::move(atoms), std::move(diseqs)).solve(std::move(assign));
}

BasicSatResult basicSat(const BasicFormula& formula) {
    VarTable table(formula);
    table.intern(Variable::nil());
    for (const auto& v : variablesOf(formula)) table.intern(v);
    const std::size_t n = table.vars.size();

    UnionFind uf(n);
    for (const auto& [a, b] : formula.pure.equalities) uf.unite(table.id.at(a), table.id.at(b));

    // Classes numbered by the first occurrence of any member.
    std::map<std::size_t, std::size_t> rootToClass;
    std::vector<std::size_t> classOfVar(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [it, fresh] = rootToClass.emplace(uf.find(i), rootToClass.size());
        classOfVar[i] = it->second;
    }
    const std::size_t classCount = rootToClass.size();
    const std::size_t nilClass = classOfVar[table.id.at(Variable::nil())];

    BasicSatResult result;
    std::vector<int> sourceCount(classCount, 0);
    for (const auto& atom : formula.spatial.atoms) ++sourceCount[classOfVar[table.id.at(atom.source)]];
    for (std::size_t c = 0; c < classCount; ++c)
        if (sourceCount[c] > 1) {
            result.status = SatStatus::DoubleAllocation;
            return result;
        }
    if (sourceCount[nilClass] > 0) {
        result.status = SatStatus::NilAllocation;
        return result;
    }
    for (const auto& [a, b] : formula.pure.disequalities)
        if (classOfVar[table.id.at(a)] == classOfVar[table.id.at(b)]) {
            result.status = SatStatus::PureConflict;
            return result;
        }

    std::vector<bool> relevant(classCount, false);
    for (const auto& atom : formula.spatial.atoms) {
        relevant[classOfVar[table.id.at(atom.source)]] = true;
        for (const auto& t : atom.targets) relevant[classOfVar[table.id.at(t)]] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (table.vars[i].kind == VarKind::Program) relevant[classOfVar[i]] = true;

    CanonicalModel model;
    model.classLocation.assign(classCount, kNull);
    int counter = 0;
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t c = 0; c < classCount; ++c) {
            if (c == nilClass || relevant[c] != (pass == 0)) continue;
            model.classLocation[c] = model.state.addLocation("c" + std::to_string(counter++));
        }

    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = table.vars[i];
        Location l = model.classLocation[classOfVar[i]];
        model.classOf[v] = classOfVar[i];
        if (v.isNil()) continue;
        if (v.kind == VarKind::Program)
            model.state.store[v.name] = l;
        else
            model.valuation[v] = l;
    }
    for (const auto& atom : formula.spatial.atoms) {
        auto& cell = model.state.heap[model.classLocation[classOfVar[table.id.at(atom.source)]]];
        for (std::size_t k = 0; k < atom.targets.size(); ++k)
            cell[static_cast<int>(k + 1)] = model.classLocation[classOfVar[table.id.at(atom.targets[k])]];
    }
    result.model = std::move(model);
    return result;
}

}  // namespace slrd
