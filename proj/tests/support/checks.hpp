#pragma once

// Exhaustive cross-checks shared by the unit tests and the acceptance runner.

#include <random>

#include "slrd/mso.hpp"
#include "slrd/translate.hpp"
#include "slrd/twa.hpp"
#include "slrd/unfolding.hpp"
#include "support/oracles.hpp"

namespace checks {

using namespace slrd;

struct Tally {
    std::size_t trees = 0;
    std::size_t queries = 0;
    std::size_t mismatches = 0;
    std::size_t positives = 0;
};

/// Routing automaton reachability against the equality closure: variable to
/// variable, and selector targets to the allocating position.
inline Tally routingAgreement(const RecursiveSystem& sys, std::size_t maxNodes) {
    auto A = buildRoutingAutomaton(sys);
    const std::size_t Q = A.states().size();
    Tally out;
    for (std::size_t p0 = 0; p0 < sys.predicates().size(); ++p0)
        for (const auto& t : enumerateTrees(sys, p0, maxNodes)) {
            ++out.trees;
            auto cls = equalityClosure(t, sys);
            auto ruleAt = [&](std::size_t n) -> const Rule& { return sys.rule(t.nodes[n].predicate, t.nodes[n].rule); };
            for (std::size_t p = 0; p < t.size(); ++p) {
                const auto& posP = t.nodes[p].position;
                for (const auto& x : ruleAt(p).variables()) {
                    auto seen = reachableSet(A, t, {p, A.require(varState(x.name))});
                    for (std::size_t r = 0; r < t.size(); ++r)
                        for (const auto& y : ruleAt(r).variables()) {
                            ++out.queries;
                            bool a = seen[r * Q + A.require(varState(y.name))];
                            bool b = cls.same(x.indexed(posP), y.indexed(t.nodes[r].position));
                            out.positives += b;
                            out.mismatches += a != b;
                        }
                }
                for (const auto& atom : ruleAt(p).head.atoms)
                    for (std::size_t s = 0; s < atom.targets.size(); ++s) {
                        auto seen = reachableSet(A, t, {p, A.require(selState(static_cast<int>(s + 1)))});
                        for (std::size_t r = 0; r < t.size(); ++r) {
                            ++out.queries;
                            bool a = seen[r * Q + A.final];
                            bool b = false;
                            for (const auto& alloc : ruleAt(r).head.atoms)
                                b = b || cls.same(atom.targets[s].indexed(posP), alloc.source.indexed(t.nodes[r].position));
                            out.positives += b;
                            out.mismatches += a != b;
                        }
                    }
            }
        }
    return out;
}

/// Nontrivial runs of the double-allocation automaton against buildModel.
inline Tally doubleAllocAgreement(const RecursiveSystem& sys, std::size_t maxNodes) {
    auto B = buildDoubleAllocAutomaton(sys);
    Tally out;
    for (std::size_t p0 = 0; p0 < sys.predicates().size(); ++p0)
        for (const auto& t : enumerateTrees(sys, p0, maxNodes)) {
            ++out.trees;
            ++out.queries;
            bool a = hasNontrivialDoubleAllocRun(B, t);
            bool b = buildModel(t, sys).status == BuildStatus::DoubleAllocation;
            out.positives += b;
            out.mismatches += a != b;
        }
    return out;
}

/// Translated basic formulas (up to three atoms) evaluated against checkBasic on
/// random states with at most four locations, null included.
inline Tally basicTranslationAgreement(unsigned seed, std::size_t rounds) {
    std::mt19937 rng(seed);
    oracle::FormulaPool pool;
    Tally out;
    while (out.queries < rounds) {
        auto f = oracle::randomBasic(rng, pool, 3, 2, true);
        State s;
        Interpretation interp;
        // half the states are built from the formula so both verdicts occur
        auto sat = basicSat(f);
        auto withNull = [](const State& st) {
            auto l = st.locations();
            l.insert(kNull);
            return l.size();
        };
        if (out.queries % 2 == 0 && sat.sat() && withNull(sat.model->state) <= 4) {
            s = sat.model->state;
            for (const auto& p : pool.programVars)
                if (!s.store.count(p)) s.store[p] = kNull;
            for (const auto& a : pool.freeLogicals) {
                auto v = Variable::logical(a);
                interp[v] = sat.model->valuation.count(v) ? sat.model->valuation.at(v) : kNull;
            }
        } else {
            s = oracle::randomState(rng, pool, 3, 2);
            interp = oracle::randomInterp(rng, pool, s);
        }
        ++out.queries;
        bool expected = checkBasic(s, interp, f);
        out.positives += expected;

        int selectors = 1;
        for (const auto& atom : f.spatial.atoms) selectors = std::max(selectors, static_cast<int>(atom.targets.size()));
        for (const auto& [l, cell] : s.heap) selectors = std::max(selectors, cell.rbegin()->first);
        Translator tr(selectors);
        auto phi = mso::conj({tr.basic(f, "X"), tr.heap("X")});
        SOInterpretation si;
        for (const auto& p : pool.programVars) si.first[barred(Variable::program(p))] = s.store.at(p);
        si.first[barred(Variable::nil())] = kNull;
        for (const auto& [v, l] : interp) si.first[barred(v)] = l;
        si.second["X"] = s.domain();
        out.mismatches += evalMSO(s, phi, si) != expected;
    }
    return out;
}

}  // namespace checks
