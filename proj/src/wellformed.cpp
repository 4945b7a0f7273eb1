#include "slrd/wellformed.hpp"

#include <json.hpp>

namespace slrd {

namespace {

/// Equality classes of pure(R)* over the rule's variables and nil.
class RuleClasses {
public:
    explicit RuleClasses(const Rule& rule) {
        for (const auto& v : rule.variables()) intern(v);
        intern(Variable::nil());
        for (const auto& [a, b] : rule.pure.equalities) uf_.unite(intern(a), intern(b));
    }

    bool same(const Variable& a, const Variable& b) { return uf_.find(intern(a)) == uf_.find(intern(b)); }

private:
    std::size_t intern(const Variable& v) {
        auto it = id_.find(v);
        if (it != id_.end()) return it->second;
        std::size_t i = uf_.add();
        id_.emplace(v, i);
        return i;
    }

    std::map<Variable, std::size_t> id_;
    UnionFind uf_;
};

std::string ruleName(const RecursiveSystem& system, std::size_t p, std::size_t r) {
    return system.predicate(p).name + "/R" + std::to_string(r + 1);
}

template <typename T>
std::string braced(const std::set<T>& items, int offset) {
    std::string out = "{";
    bool first = true;
    for (const auto& x : items) {
        out += first ? "" : ", ";
        out += std::to_string(static_cast<long long>(x) + offset);
        first = false;
    }
    return out + "}";
}

/// Parameter positions of `pred` equal (modulo pure(Q)*) to the head source of every rule Q.
std::set<std::size_t> headAllocatedParams(const RecursiveSystem& system, std::size_t pred) {
    const auto& predicate = system.predicate(pred);
    std::set<std::size_t> out;
    for (std::size_t s = 0; s < predicate.arity(); ++s) {
        bool all = true;
        for (const auto& q : predicate.rules) {
            RuleClasses cls(q);
            bool hit = false;
            for (const auto& atom : q.head.atoms) hit = hit || cls.same(atom.source, q.parameters[s]);
            all = all && hit;
        }
        if (all) out.insert(s);
    }
    return out;
}

/// Whether `v` is allocated in `rule` given the allocated parameter sets.
bool allocatedIn(const Rule& rule, RuleClasses& cls, const Variable& v,
                 const AllocatedParamSets& alloc) {
    for (const auto& atom : rule.head.atoms)
        if (cls.same(atom.source, v)) return true;
    for (const auto& occ : rule.tail)
        for (std::size_t s = 0; s < occ.args.size(); ++s)
            if (alloc[occ.predicate].count(s) && cls.same(occ.args[s], v)) return true;
    return false;
}

}  // namespace

std::vector<Violation> checkProgress(const RecursiveSystem& system) {
    std::vector<Violation> out;
    for (std::size_t p = 0; p < system.predicates().size(); ++p) {
        const auto& rules = system.predicate(p).rules;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            auto n = rules[r].head.atoms.size();
            if (n == 0)
                out.push_back({p, r, "head is emp"});
            else if (n > 1)
                out.push_back({p, r, "head allocates " + std::to_string(n) + " cells"});
        }
    }
    return out;
}

LocalSelectorTable localSelectors(const RecursiveSystem& system) {
    LocalSelectorTable table;
    std::vector<std::set<std::size_t>> headAlloc;
    for (std::size_t p = 0; p < system.predicates().size(); ++p) headAlloc.push_back(headAllocatedParams(system, p));

    for (std::size_t p = 0; p < system.predicates().size(); ++p) {
        const auto& rules = system.predicate(p).rules;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            const auto& rule = rules[r];
            if (rule.head.atoms.size() != 1) continue;
            RuleClasses cls(rule);
            const auto& targets = rule.head.atoms.front().targets;
            for (std::size_t j = 0; j < rule.tail.size(); ++j) {
                const auto& occ = rule.tail[j];
                std::set<int> sels;
                for (auto s : headAlloc[occ.predicate])
                    for (std::size_t t = 0; t < targets.size(); ++t)
                        if (cls.same(occ.args[s], targets[t])) sels.insert(static_cast<int>(t + 1));
                for (std::size_t q = 0; q < system.predicate(occ.predicate).rules.size(); ++q)
                    table[{p, r, j, q}] = sels;
            }
        }
    }
    return table;
}

std::vector<Violation> checkConnectivity(const RecursiveSystem& system) {
    std::vector<Violation> out;
    auto table = localSelectors(system);
    for (std::size_t p = 0; p < system.predicates().size(); ++p) {
        const auto& rules = system.predicate(p).rules;
        for (std::size_t r = 0; r < rules.size(); ++r)
            for (std::size_t j = 0; j < rules[r].tail.size(); ++j) {
                auto it = table.find({p, r, j, 0});
                if (it == table.end() || it->second.empty())
                    out.push_back({p, r,
                                   "tail position " + std::to_string(j + 1) + " (" +
                                       system.predicate(rules[r].tail[j].predicate).name +
                                       ") is not reached by a head selector"});
            }
    }
    return out;
}

AllocatedParamSets allocatedParameters(const RecursiveSystem& system) {
    // Greatest fixpoint: drop a position as soon as some rule fails to allocate it.
    // Finite unfoldings are well-founded, so every surviving position is allocated.
    const auto& preds = system.predicates();
    AllocatedParamSets alloc(preds.size());
    for (std::size_t p = 0; p < preds.size(); ++p)
        for (std::size_t s = 0; s < preds[p].arity(); ++s) alloc[p].insert(s);

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t p = 0; p < preds.size(); ++p) {
            for (auto it = alloc[p].begin(); it != alloc[p].end();) {
                bool keep = true;
                for (const auto& rule : preds[p].rules) {
                    RuleClasses cls(rule);
                    if (!allocatedIn(rule, cls, rule.parameters[*it], alloc)) {
                        keep = false;
                        break;
                    }
                }
                if (keep) {
                    ++it;
                } else {
                    it = alloc[p].erase(it);
                    changed = true;
                }
            }
        }
    }
    return alloc;
}

std::vector<Violation> checkEstablishment(const RecursiveSystem& system) {
    std::vector<Violation> out;
    auto alloc = allocatedParameters(system);
    for (std::size_t p = 0; p < system.predicates().size(); ++p) {
        const auto& rules = system.predicate(p).rules;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            RuleClasses cls(rules[r]);
            for (const auto& z : rules[r].bound)
                if (!allocatedIn(rules[r], cls, z, alloc))
                    out.push_back({p, r, "existential '" + z.name + "' is never allocated"});
        }
    }
    return out;
}

WellformednessReport checkWellformed(const RecursiveSystem& system) {
    WellformednessReport report;
    report.progress = checkProgress(system);
    if (report.progress.empty()) {
        report.connectivityChecked = true;
        report.connectivity = checkConnectivity(system);
        report.selectors = localSelectors(system);
    }
    report.establishment = checkEstablishment(system);
    report.allocated = allocatedParameters(system);
    return report;
}

std::string reportText(const WellformednessReport& report, const RecursiveSystem& system) {
    std::string out;
    auto section = [&](const std::string& name, const std::vector<Violation>& vs) {
        out += name + ": " + (vs.empty() ? "OK" : "FAIL") + "\n";
        for (const auto& v : vs) out += "  " + ruleName(system, v.predicate, v.rule) + ": " + v.message + "\n";
    };
    section("progress", report.progress);
    if (report.connectivityChecked) {
        section("connectivity", report.connectivity);
        for (const auto& [key, sels] : report.selectors) {
            auto [p, r, j, q] = key;
            auto callee = system.predicate(p).rules.at(r).tail.at(j).predicate;
            out += "  F(" + ruleName(system, p, r) + ", " + std::to_string(j + 1) + ", " +
                   ruleName(system, callee, q) + ") = " + braced(sels, 0) + "\n";
        }
    } else {
        out += "connectivity: SKIPPED (progress fails)\n";
    }
    section("establishment", report.establishment);
    for (std::size_t p = 0; p < report.allocated.size(); ++p)
        out += "  allocated(" + system.predicate(p).name + ") = " + braced(report.allocated[p], 1) + "\n";
    out += std::string("wellformed: ") + (report.ok() ? "yes" : "no") + "\n";
    return out;
}

std::string reportJson(const WellformednessReport& report, const RecursiveSystem& system) {
    using nlohmann::ordered_json;
    auto violations = [&](const std::vector<Violation>& vs) {
        ordered_json arr = ordered_json::array();
        for (const auto& v : vs)
            arr.push_back({{"predicate", system.predicate(v.predicate).name},
                           {"rule", v.rule + 1},
                           {"message", v.message}});
        return arr;
    };
    ordered_json doc;
    doc["wellformed"] = report.ok();
    doc["progress"] = {{"ok", report.progress.empty()}, {"violations", violations(report.progress)}};
    if (report.connectivityChecked) {
        ordered_json sets = ordered_json::array();
        for (const auto& [key, sels] : report.selectors) {
            auto [p, r, j, q] = key;
            auto callee = system.predicate(p).rules.at(r).tail.at(j).predicate;
            sets.push_back({{"rule", ruleName(system, p, r)},
                            {"tail", j + 1},
                            {"callee_rule", ruleName(system, callee, q)},
                            {"selectors", sels}});
        }
        doc["connectivity"] = {{"ok", report.connectivity.empty()},
                               {"violations", violations(report.connectivity)},
                               {"local_selectors", sets}};
    } else {
        doc["connectivity"] = {{"ok", false}, {"skipped", true}};
    }
    ordered_json alloc = ordered_json::object();
    for (std::size_t p = 0; p < report.allocated.size(); ++p) {
        std::vector<std::size_t> positions;
        for (auto s : report.allocated[p]) positions.push_back(s + 1);
        alloc[system.predicate(p).name] = positions;
    }
    doc["establishment"] = {{"ok", report.establishment.empty()},
                            {"violations", violations(report.establishment)},
                            {"allocated_parameters", alloc}};
    return doc.dump(2) + "\n";
}

}  // namespace slrd
