#include "slrd/toplevel.hpp"

#include <map>

#include "slrd/wellformed.hpp"

namespace slrd {

BasicFormula combineTopLevel(const TopLevelFormula& formula, const std::vector<const UnfoldingTree*>& trees,
                             const RecursiveSystem& system, const std::set<Variable>& keepFree) {
    if (trees.size() != formula.occurrences.size()) throw Error("one unfolding tree per predicate occurrence needed");
    BasicFormula out = formula.basic;
    std::set<Variable> bound(out.bound.begin(), out.bound.end());
    auto bind = [&](const Variable& v) {
        if (v.kind == VarKind::Logical && !keepFree.count(v) && bound.insert(v).second) out.bound.push_back(v);
    };
    for (const auto& v : formula.bound) bind(v);
    for (std::size_t j = 0; j < trees.size(); ++j) {
        TreePosition prefix{static_cast<int>(j)};
        auto phi = characteristicFormula(*trees[j], system, prefix);
        for (const auto& v : phi.bound) bind(v);
        auto params = rootParameters(system, formula.occurrences[j].predicate, prefix);
        for (const auto& v : params) bind(v);
        out.spatial.atoms.insert(out.spatial.atoms.end(), phi.spatial.atoms.begin(), phi.spatial.atoms.end());
        out.pure.equalities.insert(phi.pure.equalities.begin(), phi.pure.equalities.end());
        out.pure.disequalities.insert(phi.pure.disequalities.begin(), phi.pure.disequalities.end());
        const auto& args = formula.occurrences[j].args;
        for (std::size_t k = 0; k < args.size(); ++k) out.pure.addEquality(args[k], params[k]);
    }
    for (const auto& v : variablesOf(out)) bind(v);
    return out;
}

bool checkTopLevel(const State& state, const TopLevelFormula& formula, const RecursiveSystem& system,
                   const Interpretation& interp) {
    if (!formula.occurrences.empty() && !checkProgress(system).empty())
        throw Error("model checking predicate atoms needs every rule to allocate exactly one cell");
    std::set<Variable> keepFree;
    for (const auto& [v, l] : interp) keepFree.insert(v);

    std::size_t cells = state.heap.size();
    std::size_t own = formula.basic.spatial.atoms.size();
    if (cells < own) return false;

    std::map<std::pair<std::size_t, std::size_t>, std::vector<UnfoldingTree>> cache;
    auto trees = [&](std::size_t pred, std::size_t n) -> const std::vector<UnfoldingTree>& {
        auto key = std::make_pair(pred, n);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, treesOfSize(system, pred, n)).first;
        return it->second;
    };

    const auto& occs = formula.occurrences;
    return forEachComposition(cells - own, occs.size(), [&](const std::vector<std::size_t>& sizes) {
        std::vector<const std::vector<UnfoldingTree>*> options;
        for (std::size_t j = 0; j < occs.size(); ++j) {
            options.push_back(&trees(occs[j].predicate, sizes[j]));
            if (options.back()->empty()) return false;
        }
        std::vector<std::size_t> pick(occs.size(), 0);
        while (true) {
            std::vector<const UnfoldingTree*> chosen;
            for (std::size_t j = 0; j < occs.size(); ++j) chosen.push_back(&(*options[j])[pick[j]]);
            if (checkBasic(state, interp, combineTopLevel(formula, chosen, system, keepFree))) return true;
            std::size_t j = occs.size();
            while (true) {
                if (j == 0) return false;
                --j;
                if (++pick[j] < options[j]->size()) break;
                pick[j] = 0;
            }
        }
    });
}

}  // namespace slrd
