#include "slrd/translate.hpp"

#include <deque>
#include <functional>

namespace slrd {

using namespace mso;

std::string barred(const Variable& v) {
    if (v.isNil()) return "x_nil";
    if (v.kind == VarKind::Program) return "x_" + v.name;
    return toString(v);
}

Translator::Translator(int selectorCount, const RecursiveSystem* system)
    : selectorCount_(selectorCount), system_(system) {
    if (selectorCount_ < 1) throw Error("selector count must be positive");
    if (system_ && system_->selectorCount() > selectorCount_) selectorCount_ = system_->selectorCount();
}

std::string Translator::fresh() { return "_g" + std::to_string(counter_++); }

const RecursiveSystem& Translator::sys() const {
    if (!system_) throw Error("translating predicates needs a system of definitions");
    return *system_;
}

Mso Translator::heap(const std::string& X) {
    auto x = fresh();
    std::vector<Mso> out;
    for (int s = 1; s <= selectorCount_; ++s) {
        auto y = fresh();
        out.push_back(exists1(y, edge(s, x, y)));
    }
    return forall1(x, iff(disj(out), in(x, X)));
}

Mso Translator::singleton(const std::string& x, const std::string& X) {
    auto y = fresh();
    return conj({in(x, X), forall1(y, implies(in(y, X), eq(y, x)))});
}

Mso Translator::partition(const std::vector<std::string>& cells, const std::string& X) {
    auto x = fresh();
    std::vector<Mso> parts;
    std::vector<Mso> members;
    for (const auto& c : cells) members.push_back(in(x, c));
    parts.push_back(iff(in(x, X), disj(members)));
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j) parts.push_back(neg(conj({in(x, cells[i]), in(x, cells[j])})));
    return forall1(x, conj(parts));
}

Mso Translator::pure(const PureFormula& pure) {
    std::vector<Mso> out;
    for (const auto& [a, b] : pure.equalities) out.push_back(eq(barred(a), barred(b)));
    for (const auto& [a, b] : pure.disequalities) out.push_back(neg(eq(barred(a), barred(b))));
    return conj(out);
}

Mso Translator::spatial(const SpatialFormula& spatial, const std::string& X) {
    const auto& atoms = spatial.atoms;
    if (atoms.empty()) {
        auto x = fresh();
        return forall1(x, neg(in(x, X)));
    }
    auto pointsTo = [&](const PointsTo& atom, const std::string& cell) {
        auto src = barred(atom.source);
        std::vector<Mso> out{singleton(src, cell)};
        for (std::size_t i = 0; i < atom.targets.size(); ++i)
            out.push_back(edge(static_cast<int>(i + 1), src, barred(atom.targets[i])));
        for (int i = static_cast<int>(atom.targets.size()) + 1; i <= selectorCount_; ++i) {
            auto x = fresh();
            out.push_back(forall1(x, neg(edge(i, src, x))));
        }
        return conj(out);
    };
    // a1 * (a2 * (... * an))
    std::function<Mso(std::size_t, const std::string&)> star = [&](std::size_t i, const std::string& cell) -> Mso {
        if (i + 1 == atoms.size()) return pointsTo(atoms[i], cell);
        auto y = fresh();
        auto z = fresh();
        return exists2(y, exists2(z, conj({pointsTo(atoms[i], y), star(i + 1, z), partition({y, z}, cell)})));
    };
    return star(0, X);
}

Mso Translator::basic(const BasicFormula& formula, const std::string& X) {
    Mso body = conj({pure(formula.pure), spatial(formula.spatial, X)});
    for (auto it = formula.bound.rbegin(); it != formula.bound.rend(); ++it) body = exists1(barred(*it), body);
    return body;
}

Translator::Labels Translator::labels(const std::string& T) {
    Labels l;
    l.root = fresh();
    l.cells = T;
    for (std::size_t p = 0; p < sys().predicates().size(); ++p)
        for (std::size_t r = 0; r < sys().predicate(p).rules.size(); ++r)
            for (int d : sys().directions()) l.sets[{p, r, d}] = fresh();
    return l;
}

Mso Translator::labelled(const Labels& l, std::size_t p, std::size_t r, std::optional<int> dir, const std::string& x) {
    if (dir) return in(x, l.sets.at({p, r, *dir}));
    std::vector<Mso> out;
    for (int d : sys().directions()) out.push_back(in(x, l.sets.at({p, r, d})));
    return disj(out);
}

Mso Translator::succ(const Labels& l, int d, const std::string& x, const std::string& y) {
    if (!selectors_) selectors_ = localSelectors(sys());
    std::vector<Mso> out;
    for (std::size_t i = 0; i < sys().predicates().size(); ++i)
        for (std::size_t j = 0; j < sys().predicate(i).rules.size(); ++j) {
            const auto& tail = sys().rule(i, j).tail;
            if (static_cast<std::size_t>(d) >= tail.size()) continue;
            auto callee = tail[d].predicate;
            for (std::size_t q = 0; q < sys().predicate(callee).rules.size(); ++q) {
                std::vector<Mso> parts{labelled(l, i, j, std::nullopt, x), labelled(l, callee, q, d, y)};
                auto it = selectors_->find({i, j, static_cast<std::size_t>(d), q});
                if (it != selectors_->end())
                    for (int s : it->second) parts.push_back(edge(s, x, y));
                out.push_back(conj(parts));
            }
        }
    return disj(out);
}

Mso Translator::anySucc(const Labels& l, const std::string& x, const std::string& y) {
    std::vector<Mso> out;
    for (std::size_t d = 0; d < sys().maxTail(); ++d) out.push_back(succ(l, static_cast<int>(d), x, y));
    return disj(out);
}

Mso Translator::tree(const Labels& l) {
    std::vector<Mso> out{in(l.root, l.cells)};
    std::vector<std::string> sets;
    for (const auto& [key, name] : l.sets) sets.push_back(name);

    auto x = fresh();
    std::vector<Mso> any;
    for (const auto& s : sets) any.push_back(in(x, s));
    std::vector<Mso> labelling{iff(in(x, l.cells), disj(any))};
    for (std::size_t a = 0; a < sets.size(); ++a)
        for (std::size_t b = a + 1; b < sets.size(); ++b)
            labelling.push_back(neg(conj({in(x, sets[a]), in(x, sets[b])})));
    std::vector<Mso> rootLabels;
    for (const auto& [key, name] : l.sets)
        if (std::get<2>(key) == -1) rootLabels.push_back(in(x, name));
    labelling.push_back(implies(disj(rootLabels), eq(x, l.root)));
    out.push_back(forall1(x, conj(labelling)));

    // every non-root position has a parent
    auto y = fresh();
    auto px = fresh();
    out.push_back(forall1(y, implies(conj({in(y, l.cells), neg(eq(y, l.root))}),
                                     exists1(px, conj({in(px, l.cells), anySucc(l, px, y)})))));
    // parents are unique
    auto c = fresh();
    auto p1 = fresh();
    auto p2 = fresh();
    out.push_back(forall1(
        c, forall1(p1, forall1(p2, implies(conj({anySucc(l, p1, c), anySucc(l, p2, c)}), eq(p1, p2))))));
    // each direction leads to at most one child
    for (std::size_t d = 0; d < sys().maxTail(); ++d) {
        auto u = fresh();
        auto c1 = fresh();
        auto c2 = fresh();
        int dir = static_cast<int>(d);
        out.push_back(forall1(
            u, forall1(c1, forall1(c2, implies(conj({succ(l, dir, u, c1), succ(l, dir, u, c2)}), eq(c1, c2))))));
    }
    // every nonempty predecessor-closed subset of T contains the root
    auto W = fresh();
    auto w = fresh();
    auto a = fresh();
    auto b = fresh();
    out.push_back(forall2(
        W, implies(conj({exists1(w, in(w, W)), subset(W, l.cells, fresh()),
                         forall1(a, forall1(b, implies(conj({in(b, W), anySucc(l, a, b)}), in(a, W))))}),
                   in(l.root, W))));
    return conj(out);
}

Mso Translator::succLabels(const Labels& l) {
    std::vector<Mso> out;
    for (std::size_t i = 0; i < sys().predicates().size(); ++i)
        for (std::size_t j = 0; j < sys().predicate(i).rules.size(); ++j) {
            const auto& rule = sys().rule(i, j);
            auto x = fresh();
            std::vector<Mso> then;
            for (std::size_t d = 0; d < rule.tail.size(); ++d) {
                auto y = fresh();
                auto callee = rule.tail[d].predicate;
                std::vector<Mso> labelsAt;
                for (std::size_t q = 0; q < sys().predicate(callee).rules.size(); ++q)
                    labelsAt.push_back(labelled(l, callee, q, static_cast<int>(d), y));
                then.push_back(exists1(y, conj({disj(labelsAt), succ(l, static_cast<int>(d), x, y)})));
            }
            std::size_t arity = rule.head.atoms.empty() ? 0 : rule.head.atoms.front().targets.size();
            for (int s = static_cast<int>(arity) + 1; s <= selectorCount_; ++s) {
                auto y = fresh();
                then.push_back(forall1(y, neg(edge(s, x, y))));
            }
            out.push_back(forall1(x, implies(labelled(l, i, j, std::nullopt, x), conj(then))));
        }
    return conj(out);
}

Mso Translator::backbone(const Labels& l, std::size_t i) {
    std::vector<Mso> rootLabel;
    for (std::size_t j = 0; j < sys().predicate(i).rules.size(); ++j) rootLabel.push_back(labelled(l, i, j, -1, l.root));
    return conj({tree(l), disj(rootLabel), succLabels(l)});
}

Mso Translator::guard(const Transition& t, const Labels& l, const std::string& u) {
    std::vector<Mso> out;
    switch (t.label.kind) {
        case LabelGuard::Kind::Any:
            out.push_back(in(u, l.cells));
            break;
        case LabelGuard::Kind::Root:
            out.push_back(eq(u, l.root));
            break;
        case LabelGuard::Kind::Rule:
            out.push_back(labelled(l, t.label.predicate, t.label.rule, t.label.direction, u));
            break;
    }
    switch (t.parent.kind) {
        case ParentGuard::Kind::Any:
            break;
        case ParentGuard::Kind::Unknown:
            out.push_back(eq(u, l.root));
            break;
        case ParentGuard::Kind::Rule: {
            auto v = fresh();
            out.push_back(exists1(v, conj({labelled(l, t.parent.predicate, t.parent.rule, std::nullopt, v),
                                           anySucc(l, v, u)})));
            break;
        }
    }
    return conj(out);
}

Mso Translator::reach(const TreeWalkingAutomaton& a, const Labels& l, const std::string& from, std::size_t q,
                      const std::string& to, std::size_t q2) {
    // Only states on some path q ->* q2 of the state graph matter.
    const auto n = a.states().size();
    auto closure = [&](std::size_t start, bool forward) {
        std::vector<bool> seen(n, false);
        std::deque<std::size_t> queue{start};
        seen[start] = true;
        while (!queue.empty()) {
            auto s = queue.front();
            queue.pop_front();
            for (const auto& t : a.transitions()) {
                auto [src, dst] = forward ? std::pair{t.from, t.to} : std::pair{t.to, t.from};
                if (src == s && !seen[dst]) {
                    seen[dst] = true;
                    queue.push_back(dst);
                }
            }
        }
        return seen;
    };
    auto fwd = closure(q, true);
    if (!fwd[q2]) return q == q2 ? eq(from, to) : falsity();
    auto bwd = closure(q2, false);

    // Least-closure encoding: every transition-closed family of position sets
    // that contains <from, q> also contains <to, q2>.
    std::map<std::size_t, std::string> Z;
    for (std::size_t s = 0; s < n; ++s)
        if (fwd[s] && bwd[s]) Z[s] = fresh();

    std::vector<Mso> escapes;
    for (const auto& [s, name] : Z) escapes.push_back(neg(subset(name, l.cells, fresh())));
    escapes.push_back(neg(in(from, Z.at(q))));
    escapes.push_back(in(to, Z.at(q2)));
    for (const auto& t : a.transitions()) {
        if (!Z.count(t.from) || !Z.count(t.to)) continue;
        if (t.from == t.to && t.move == Transition::kStay) continue;
        auto u = fresh();
        std::vector<Mso> open{in(u, Z.at(t.from)), guard(t, l, u)};
        if (t.move == Transition::kStay) {
            open.push_back(neg(in(u, Z.at(t.to))));
        } else {
            auto w = fresh();
            auto step = t.move == -1 ? anySucc(l, w, u) : succ(l, t.move, u, w);
            open.push_back(exists1(w, conj({step, neg(in(w, Z.at(t.to)))})));
        }
        escapes.push_back(exists1(u, conj(open)));
    }
    Mso body = disj(escapes);
    for (auto it = Z.rbegin(); it != Z.rend(); ++it) body = forall2(it->second, body);
    return body;
}

Mso Translator::innerEdges(const Labels& l) {
    if (!routing_) routing_ = buildRoutingAutomaton(sys());
    auto x = fresh();
    auto y = fresh();
    std::vector<Mso> perSel;
    for (int s = 1; s <= sys().selectorCount(); ++s)
        perSel.push_back(implies(reach(*routing_, l, x, routing_->require(selState(s)), y, routing_->final),
                                 edge(s, x, y)));
    return forall1(x, forall1(y, implies(conj({in(x, l.cells), in(y, l.cells)}), conj(perSel))));
}

Mso Translator::noDoubleAlloc(const Labels& l) {
    if (!doubleAlloc_) doubleAlloc_ = buildDoubleAllocAutomaton(sys());
    auto p = fresh();
    auto q = fresh();
    auto run = reach(*doubleAlloc_, l, p, doubleAlloc_->require("q_0"), q, doubleAlloc_->final);
    return forall1(p, forall1(q, implies(conj({in(p, l.cells), in(q, l.cells), run}), eq(p, q))));
}

Mso Translator::params(const Labels& l, std::size_t i, const std::vector<std::string>& args) {
    const auto& pred = sys().predicate(i);
    std::vector<Mso> out;
    for (std::size_t j = 0; j < pred.arity(); ++j) {
        auto c = buildParamAutomata(sys(), i, j);
        const auto& x = args[j];
        auto y = fresh();
        out.push_back(forall1(
            y, implies(conj({in(y, l.cells), reach(c[0], l, l.root, c[0].initial, y, c[0].final)}), eq(x, y))));
        for (int s = 1; s <= sys().selectorCount(); ++s) {
            auto z = fresh();
            out.push_back(forall1(z, implies(conj({in(z, l.cells), reach(c[1], l, l.root, c[1].initial, z,
                                                                         c[1].require(selState(s)))}),
                                             edge(s, z, x))));
        }
        for (std::size_t a = 0; a < pred.arity(); ++a) {
            if (a == j) continue;
            auto marker = c[2].require(markerState(sys(), i, a));
            out.push_back(implies(reach(c[2], l, l.root, c[2].initial, l.root, marker), eq(x, args[a])));
        }
    }
    return conj(out);
}

Mso Translator::nilEdges(const Labels& l) {
    std::vector<Mso> out;
    for (std::size_t i = 0; i < sys().predicates().size(); ++i)
        for (std::size_t j = 0; j < sys().predicate(i).rules.size(); ++j)
            for (const auto& atom : sys().rule(i, j).head.atoms)
                for (std::size_t s = 0; s < atom.targets.size(); ++s) {
                    if (!atom.targets[s].isNil()) continue;
                    auto x = fresh();
                    out.push_back(forall1(x, implies(labelled(l, i, j, std::nullopt, x),
                                                     edge(static_cast<int>(s + 1), x, barred(Variable::nil())))));
                }
    return conj(out);
}

Mso Translator::predicate(std::size_t i, const std::vector<std::string>& args, const std::string& T) {
    if (args.size() != sys().predicate(i).arity()) throw Error("wrong number of arguments");
    auto l = labels(T);
    std::vector<Mso> body;
    for (const auto& [key, name] : l.sets) body.push_back(subset(name, T, fresh()));
    body.push_back(backbone(l, i));
    body.push_back(nilEdges(l));
    body.push_back(innerEdges(l));
    body.push_back(noDoubleAlloc(l));
    body.push_back(params(l, i, args));
    Mso out = conj(body);
    for (auto it = l.sets.rbegin(); it != l.sets.rend(); ++it) out = exists2(it->second, out);
    return exists1(l.root, out);
}

Mso Translator::topLevel(const TopLevelFormula& formula, const std::string& X) {
    std::vector<Variable> quantified = formula.bound;
    std::set<Variable> seen(quantified.begin(), quantified.end());
    for (const auto& v : variablesOf(formula))
        if (v.kind == VarKind::Logical && seen.insert(v).second) quantified.push_back(v);

    Mso body;
    if (formula.occurrences.empty()) {
        BasicFormula b = formula.basic;
        b.bound.clear();
        body = basic(b, X);
    } else {
        std::vector<std::string> cells;
        std::vector<Mso> parts{pure(formula.basic.pure)};
        if (!formula.basic.spatial.isEmp()) {
            cells.push_back(fresh());
            parts.push_back(spatial(formula.basic.spatial, cells.back()));
        }
        for (const auto& occ : formula.occurrences) {
            cells.push_back(fresh());
            std::vector<std::string> args;
            for (const auto& a : occ.args) args.push_back(barred(a));
            parts.push_back(predicate(occ.predicate, args, cells.back()));
        }
        for (const auto& c : cells) parts.push_back(subset(c, X, fresh()));
        parts.push_back(partition(cells, X));
        body = conj(parts);
        for (auto it = cells.rbegin(); it != cells.rend(); ++it) body = exists2(*it, body);
    }
    for (auto it = quantified.rbegin(); it != quantified.rend(); ++it) body = exists1(barred(*it), body);
    return body;
}

Mso Translator::sentence(const TopLevelFormula& formula) {
    auto X = fresh();
    Mso body = exists2(X, conj({heap(X), topLevel(formula, X)}));
    auto nil = barred(Variable::nil());
    body = exists1(nil, conj({null(nil), body}));
    std::set<std::string> programVars;
    for (const auto& v : variablesOf(formula))
        if (v.kind == VarKind::Program && !v.isNil()) programVars.insert(v.name);
    for (auto it = programVars.rbegin(); it != programVars.rend(); ++it) {
        auto x = barred(Variable::program(*it));
        body = exists1(x, conj({var(*it, x), body}));
    }
    return body;
}

Mso translateBasic(const BasicFormula& formula, int selectorCount) {
    return Translator(selectorCount).basic(formula, "X");
}

Mso translatePredicate(const RecursiveSystem& system, std::size_t predicate) {
    std::vector<std::string> args;
    for (const auto& x : system.predicate(predicate).parameters) args.push_back(barred(x));
    return Translator(system.selectorCount(), &system).predicate(predicate, args, "T");
}

Mso translateTopLevel(const TopLevelFormula& formula, const RecursiveSystem& system) {
    return Translator(system.selectorCount(), &system).topLevel(formula, "X");
}

Mso translateSentence(const TopLevelFormula& formula, const RecursiveSystem& system) {
    return Translator(system.selectorCount(), &system).sentence(formula);
}

}  // namespace slrd
