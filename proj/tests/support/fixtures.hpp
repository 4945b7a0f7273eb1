#pragma once

#include "slrd/toplevel.hpp"
#include "slrd/unfolding.hpp"

namespace fixture {

using namespace slrd;

/// The tll tree with three internal nodes and four leaves.
inline UnfoldingTree fig3Tree(const RecursiveSystem& tll) {
    TreeShape leaf{0, {}};
    TreeShape mid{1, {leaf, leaf}};
    return makeTree(tll, 0, TreeShape{1, {mid, mid}});
}

/// Its model with p and leaf_r at null, root on the top cell and head on the leftmost leaf.
inline State fig3State(const RecursiveSystem& tll) {
    auto m = buildModel(fig3Tree(tll), tll, std::map<std::string, Location>{{"p", kNull}, {"leaf_r", kNull}});
    State s = m.state;
    s.store["root"] = m.mu[0];
    s.store["head"] = m.valuation.at(Variable::logical("leaf_l").indexed({}));
    return s;
}

/// The same shape written out by hand: selectors left, right, parent, next leaf.
inline State fig3Expected() {
    return parseState(R"({
      "store": {"root": "n", "head": "l1"},
      "heap": {
        "n":  {"1": "a",    "2": "b",    "3": "null", "4": "null"},
        "a":  {"1": "l1",   "2": "l2",   "3": "n",    "4": "null"},
        "b":  {"1": "l3",   "2": "l4",   "3": "n",    "4": "null"},
        "l1": {"1": "null", "2": "null", "3": "a",    "4": "l2"},
        "l2": {"1": "null", "2": "null", "3": "a",    "4": "l3"},
        "l3": {"1": "null", "2": "null", "3": "b",    "4": "l4"},
        "l4": {"1": "null", "2": "null", "3": "b",    "4": "null"}
      }
    })");
}

/// P(a1, ..., an) over fresh free logical variables, with the valuation that
/// maps them to the root parameters of a built model.
inline std::pair<TopLevelFormula, Interpretation> rootCall(const RecursiveSystem& sys, const UnfoldingTree& t,
                                                           const BuiltModel& m) {
    TopLevelFormula f;
    PredicateOccurrence occ{t.root().predicate, {}};
    Interpretation interp;
    const auto& params = sys.predicate(t.root().predicate).parameters;
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto a = Variable::logical("arg" + std::to_string(k));
        occ.args.push_back(a);
        interp[a] = m.valuation.at(params[k].indexed({}));
    }
    f.occurrences.push_back(occ);
    return {f, interp};
}

}  // namespace fixture
