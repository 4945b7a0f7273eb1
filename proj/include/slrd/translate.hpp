#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "slrd/ast.hpp"
#include "slrd/mso.hpp"
#include "slrd/twa.hpp"
#include "slrd/wellformed.hpp"

namespace slrd {

/// MSO name of an SL variable: x_u for program variables, x_nil for nil.
std::string barred(const Variable& v);

/// Builds MSO formulas; internal names are drawn from _g0, _g1, ... in construction order.
class Translator {
public:
    /// `selectorCount` is |Sel|; pass the system's count when one is given.
    explicit Translator(int selectorCount, const RecursiveSystem* system = nullptr);

    std::string fresh();

    Mso heap(const std::string& X);
    /// X = {x}
    Mso singleton(const std::string& x, const std::string& X);
    /// The cells partition X.
    Mso partition(const std::vector<std::string>& cells, const std::string& X);

    Mso pure(const PureFormula& pure);
    Mso spatial(const SpatialFormula& spatial, const std::string& X);
    /// exists bound . pure & spatial(X)
    Mso basic(const BasicFormula& formula, const std::string& X);

    /// P_i(args) over the cell set T.
    Mso predicate(std::size_t i, const std::vector<std::string>& args, const std::string& T);
    /// phi(X) for a top-level formula.
    Mso topLevel(const TopLevelFormula& formula, const std::string& X);
    /// Closed sentence: program variables, nil, exists X . phi(X) & Heap(X).
    Mso sentence(const TopLevelFormula& formula);

    /// Names of the labelling variables of one predicate translation.
    struct Labels {
        std::string root;
        std::string cells;
        std::map<std::tuple<std::size_t, std::size_t, int>, std::string> sets;  // (pred, rule, direction)
    };
    Labels labels(const std::string& T);

    Mso labelled(const Labels& l, std::size_t p, std::size_t r, std::optional<int> dir, const std::string& x);
    Mso succ(const Labels& l, int d, const std::string& x, const std::string& y);
    Mso anySucc(const Labels& l, const std::string& x, const std::string& y);
    Mso tree(const Labels& l);
    Mso succLabels(const Labels& l);
    Mso backbone(const Labels& l, std::size_t i);
    /// <a, q> reaches <b, q2> in the automaton over the tree encoded by `l`.
    Mso reach(const TreeWalkingAutomaton& a, const Labels& l, const std::string& from, std::size_t q,
              const std::string& to, std::size_t q2);
    Mso innerEdges(const Labels& l);
    Mso noDoubleAlloc(const Labels& l);
    Mso params(const Labels& l, std::size_t i, const std::vector<std::string>& args);
    Mso nilEdges(const Labels& l);

private:
    const RecursiveSystem& sys() const;
    Mso guard(const Transition& t, const Labels& l, const std::string& u);

    int selectorCount_;
    const RecursiveSystem* system_;
    std::size_t counter_ = 0;
    std::optional<LocalSelectorTable> selectors_;
    std::optional<TreeWalkingAutomaton> routing_;
    std::optional<TreeWalkingAutomaton> doubleAlloc_;
};

/// Convenience wrappers with X (or T) as the free set variable.
Mso translateBasic(const BasicFormula& formula, int selectorCount);
Mso translatePredicate(const RecursiveSystem& system, std::size_t predicate);
Mso translateTopLevel(const TopLevelFormula& formula, const RecursiveSystem& system);
Mso translateSentence(const TopLevelFormula& formula, const RecursiveSystem& system);

}  // namespace slrd
