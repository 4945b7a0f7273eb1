#include "slrd/decision.hpp"

#include <atomic>
#include <functional>
#include <limits>
#include <mutex>
#include <map>
#include <stdexcept>
#include <thread>

#include "slrd/toplevel.hpp"
#include "slrd/wellformed.hpp"

namespace slrd {

const char* verdictName(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::Sat: return "SAT";
        case VerdictKind::UnsatUpTo: return "UNSAT_UP_TO";
        case VerdictKind::ValidUpTo: return "VALID_UP_TO";
        case VerdictKind::Refuted: return "REFUTED";
    }
    return "?";
}

namespace {

void requireWellformed(const RecursiveSystem& system) {
    auto report = checkWellformed(system);
    if (report.ok()) return;
    std::string first;
    for (const auto* group : {&report.progress, &report.connectivity, &report.establishment})
        if (first.empty() && !group->empty()) {
            const auto& v = group->front();
            first = system.predicate(v.predicate).name + "/R" + std::to_string(v.rule + 1) + ": " + v.message;
        }
    throw Error("recursive system is not well-formed (" + first + ")");
}

std::set<Variable> freeLogicals(const TopLevelFormula& formula) {
    std::set<Variable> bound(formula.bound.begin(), formula.bound.end());
    bound.insert(formula.basic.bound.begin(), formula.basic.bound.end());
    std::set<Variable> out;
    for (const auto& v : variablesOf(formula))
        if (v.kind == VarKind::Logical && !v.isNil() && !bound.count(v)) out.insert(v);
    return out;
}

struct Candidate {
    std::vector<const UnfoldingTree*> trees;
};

/// Smallest index i with hit(i) true, evaluated on up to `threads` workers.
std::optional<std::size_t> firstHit(std::size_t count, unsigned threads, const std::function<bool(std::size_t)>& hit) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            if (hit(i)) return i;
        return std::nullopt;
    }
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::atomic<std::size_t> next{0}, best{none};
    std::exception_ptr failure;
    std::mutex failureLock;
    auto worker = [&] {
        try {
            for (std::size_t i = next++; i < count && i < best.load(); i = next++)
                if (hit(i)) {
                    auto cur = best.load();
                    while (i < cur && !best.compare_exchange_weak(cur, i)) {
                    }
                }
        } catch (...) {
            std::lock_guard<std::mutex> guard(failureLock);
            if (!failure) failure = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, count); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    if (best == none) return std::nullopt;
    return best.load();
}

/// Walks tree tuples level by level (total node count), stopping at the first
/// level where `hit` succeeds; returns the minimal hit in enumeration order.
class TupleSearch {
public:
    TupleSearch(const TopLevelFormula& formula, const RecursiveSystem& system) : formula_(formula), system_(system) {}

    template <typename Hit>
    std::optional<Candidate> run(std::size_t bound, unsigned threads, std::size_t& examined, Hit&& hit) {
        const auto& occs = formula_.occurrences;
        for (std::size_t total = occs.empty() ? 0 : occs.size(); total <= (occs.empty() ? 0 : bound); ++total) {
            std::vector<Candidate> level;
            forEachComposition(total, occs.size(), [&](const std::vector<std::size_t>& sizes) {
                std::vector<const std::vector<UnfoldingTree>*> options;
                for (std::size_t j = 0; j < occs.size(); ++j) {
                    options.push_back(&trees(occs[j].predicate, sizes[j]));
                    if (options.back()->empty()) return false;
                }
                std::vector<std::size_t> pick(occs.size(), 0);
                while (true) {
                    Candidate c;
                    for (std::size_t j = 0; j < occs.size(); ++j) c.trees.push_back(&(*options[j])[pick[j]]);
                    level.push_back(std::move(c));
                    std::size_t j = occs.size();
                    while (j > 0 && ++pick[j - 1] == options[j - 1]->size()) pick[--j] = 0;
                    if (j == 0) return false;
                }
            });
            examined += level.size();
            auto found = firstHit(level.size(), threads, [&](std::size_t i) { return hit(level[i]); });
            if (found) return level[*found];
        }
        return std::nullopt;
    }

private:
    const std::vector<UnfoldingTree>& trees(std::size_t pred, std::size_t n) {
        auto key = std::make_pair(pred, n);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, treesOfSize(system_, pred, n)).first;
        return it->second;
    }

    const TopLevelFormula& formula_;
    const RecursiveSystem& system_;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<UnfoldingTree>> cache_;
};

struct LhsModel {
    State state;
    Interpretation valuation;
};

std::optional<LhsModel> modelOf(const TopLevelFormula& formula, const Candidate& c, const RecursiveSystem& system,
                                const std::set<Variable>& free) {
    auto result = basicSat(combineTopLevel(formula, c.trees, system, free));
    if (!result.sat()) return std::nullopt;
    LhsModel out{std::move(result.model->state), {}};
    for (const auto& v : free) out.valuation[v] = result.model->valuation.at(v);
    return out;
}

std::vector<UnfoldingTree> copyTrees(const Candidate& c) {
    std::vector<UnfoldingTree> out;
    for (const auto* t : c.trees) out.push_back(*t);
    return out;
}

}  // namespace

Verdict satBounded(const TopLevelFormula& formula, const RecursiveSystem& system, std::size_t bound,
                   const DecisionOptions& options) {
    requireWellformed(system);
    auto free = freeLogicals(formula);
    Verdict verdict;
    verdict.bound = bound;
    TupleSearch search(formula, system);
    auto found = search.run(bound, options.threads, verdict.candidates, [&](const Candidate& c) {
        return modelOf(formula, c, system, free).has_value();
    });
    if (!found) return verdict;
    auto model = *modelOf(formula, *found, system, free);
    if (!checkTopLevel(model.state, formula, system, model.valuation))
        throw std::logic_error("satisfiability witness does not replay");
    verdict.kind = VerdictKind::Sat;
    verdict.witness = std::move(model.state);
    verdict.valuation = std::move(model.valuation);
    verdict.trees = copyTrees(*found);
    return verdict;
}

Verdict entail(const TopLevelFormula& lhs, const TopLevelFormula& rhs, const RecursiveSystem& system,
               std::size_t bound, const DecisionOptions& options) {
    requireWellformed(system);
    auto free = freeLogicals(lhs);
    auto rhsFree = freeLogicals(rhs);
    std::set<std::string> rhsProgram;
    for (const auto& v : variablesOf(rhs))
        if (v.kind == VarKind::Program && !v.isNil()) rhsProgram.insert(v.name);

    auto counterexample = [&](const Candidate& c) -> std::optional<LhsModel> {
        auto model = modelOf(lhs, c, system, free);
        if (!model) return std::nullopt;
        // Variables only the right side mentions point somewhere unrelated.
        for (const auto& u : rhsProgram)
            if (!model->state.store.count(u)) model->state.store[u] = model->state.addLocation("d_" + u);
        Interpretation shared;
        for (const auto& [v, l] : model->valuation)
            if (rhsFree.count(v)) shared[v] = l;
        if (checkTopLevel(model->state, rhs, system, shared)) return std::nullopt;
        return model;
    };

    Verdict verdict;
    verdict.bound = bound;
    verdict.kind = VerdictKind::ValidUpTo;
    TupleSearch search(lhs, system);
    auto found = search.run(bound, options.threads, verdict.candidates,
                            [&](const Candidate& c) { return counterexample(c).has_value(); });
    if (!found) return verdict;
    auto model = *counterexample(*found);
    if (!checkTopLevel(model.state, lhs, system, model.valuation))
        throw std::logic_error("counterexample does not satisfy the left-hand side");
    verdict.kind = VerdictKind::Refuted;
    verdict.witness = std::move(model.state);
    verdict.valuation = std::move(model.valuation);
    verdict.trees = copyTrees(*found);
    return verdict;
}

}  // namespace slrd
