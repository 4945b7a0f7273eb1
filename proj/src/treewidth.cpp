#include "slrd/treewidth.hpp"

#include <algorithm>
#include <json.hpp>

#include "slrd/wellformed.hpp"

namespace slrd {

std::map<Location, std::set<Location>> underlyingGraph(const State& state) {
    std::map<Location, std::set<Location>> g;
    for (auto l : state.locations()) g[l];
    for (const auto& [l, cell] : state.heap)
        for (const auto& [k, t] : cell)
            if (t != l) {
                g[l].insert(t);
                g[t].insert(l);
            }
    return g;
}

DecompositionCheck validateDecomposition(const State& state, const TreeDecomposition& decomposition) {
    DecompositionCheck out;
    const auto& bags = decomposition.bags;
    auto locs = state.locations();
    if (bags.empty()) {
        if (locs.empty()) out.width = 0;
        else out.violation = "condition 1: no bags for a nonempty state";
        return out;
    }
    for (const auto& [pos, bag] : bags) {
        if (!pos.empty()) {
            TreePosition parent(pos.begin(), pos.end() - 1);
            if (!bags.count(parent)) {
                out.violation = "positions are not prefix-closed at " + positionToString(pos);
                return out;
            }
        }
        for (auto l : bag)
            if (!locs.count(l)) {
                out.violation = "bag " + positionToString(pos) + " holds " + state.nameOf(l) + ", not a location of the state";
                return out;
            }
    }
    for (auto l : locs) {
        bool found = false;
        for (const auto& [pos, bag] : bags) found = found || bag.count(l);
        if (!found) {
            out.violation = "condition 1: location " + state.nameOf(l) + " is in no bag";
            return out;
        }
    }
    for (const auto& [l, ns] : underlyingGraph(state))
        for (auto m : ns) {
            if (m < l) continue;
            bool found = false;
            for (const auto& [pos, bag] : bags) found = found || (bag.count(l) && bag.count(m));
            if (!found) {
                out.violation = "condition 2: edge " + state.nameOf(l) + " - " + state.nameOf(m) + " is in no bag";
                return out;
            }
        }
    for (auto l : locs) {
        // Bags holding l are connected iff exactly one of them has a parent bag without l.
        int tops = 0;
        for (const auto& [pos, bag] : bags) {
            if (!bag.count(l)) continue;
            if (pos.empty() || !bags.at(TreePosition(pos.begin(), pos.end() - 1)).count(l)) ++tops;
        }
        if (tops != 1) {
            out.violation = "condition 3: bags holding " + state.nameOf(l) + " are not connected";
            return out;
        }
    }
    std::size_t widest = 0;
    for (const auto& [pos, bag] : bags) widest = std::max(widest, bag.size());
    out.width = std::max(0, static_cast<int>(widest) - 1);
    return out;
}

TreewidthResult exactTreewidth(const State& state, int maxK) {
    auto graph = underlyingGraph(state);
    const std::size_t n = graph.size();
    if (n > kMaxExactVertices)
        throw Error("exact treewidth supports at most " + std::to_string(kMaxExactVertices) + " locations, state has " +
                    std::to_string(n));
    TreewidthResult result;
    if (n == 0) {
        result.exceeds = maxK < 0;
        return result;
    }
    std::vector<Location> verts;
    std::map<Location, int> idx;
    for (const auto& [l, ns] : graph) {
        idx[l] = static_cast<int>(verts.size());
        verts.push_back(l);
    }
    std::vector<unsigned> adj(n, 0);
    for (const auto& [l, ns] : graph)
        for (auto m : ns) adj[idx[l]] |= 1u << idx[m];

    // q(S, v): vertices outside S + v reachable from v through S.
    auto q = [&](unsigned S, int v) {
        unsigned seen = 1u << v, frontier = 1u << v, out = 0;
        while (frontier) {
            int u = __builtin_ctz(frontier);
            frontier &= frontier - 1;
            unsigned next = adj[u] & ~seen;
            seen |= next;
            out |= next & ~S;
            frontier |= next & S;
        }
        return __builtin_popcount(out);
    };

    const unsigned full = (1u << n) - 1;
    std::vector<int> tw(1u << n, 0);
    std::vector<int> last(1u << n, -1);
    for (unsigned S = 1; S <= full; ++S) {
        int best = 1 << 20;
        for (int v = 0; v < static_cast<int>(n); ++v) {
            if (!((S >> v) & 1)) continue;
            unsigned rest = S & ~(1u << v);
            int cand = std::max(tw[rest], q(rest, v));
            if (cand < best) {
                best = cand;
                last[S] = v;
            }
        }
        tw[S] = best;
    }
    result.width = tw[full];
    result.exceeds = result.width > maxK;

    std::vector<int> order(n);
    for (unsigned S = full, i = n; S; S &= ~(1u << last[S])) order[--i] = last[S];

    // Bags from the elimination order, each hung below its earliest-eliminated later neighbour.
    std::vector<int> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = static_cast<int>(i);
    std::vector<unsigned> fill = adj;
    std::vector<unsigned> bag(n);
    std::vector<int> parent(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        int v = order[i];
        unsigned later = 0;
        for (int u = 0; u < static_cast<int>(n); ++u)
            if (((fill[v] >> u) & 1) && rank[u] > rank[v]) later |= 1u << u;
        bag[v] = later | (1u << v);
        for (int a = 0; a < static_cast<int>(n); ++a)
            if ((later >> a) & 1) fill[a] |= later & ~(1u << a);
        int p = -1;
        for (int u = 0; u < static_cast<int>(n); ++u)
            if (((later >> u) & 1) && (p < 0 || rank[u] < rank[p])) p = u;
        parent[v] = p;
    }
    int root = order[n - 1];
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (parent[order[i]] < 0) parent[order[i]] = root;

    std::vector<std::vector<int>> children(n);
    for (std::size_t i = n; i-- > 0;)
        if (order[i] != root) children[parent[order[i]]].push_back(order[i]);
    std::vector<std::pair<int, TreePosition>> stack{{root, {}}};
    while (!stack.empty()) {
        auto [v, pos] = stack.back();
        stack.pop_back();
        auto& b = result.witness.bags[pos];
        for (int u = 0; u < static_cast<int>(n); ++u)
            if ((bag[v] >> u) & 1) b.insert(verts[u]);
        for (std::size_t c = 0; c < children[v].size(); ++c) {
            auto child = pos;
            child.push_back(static_cast<int>(c));
            stack.push_back({children[v][c], child});
        }
    }
    return result;
}

std::size_t treewidthBound(const BasicFormula& formula, std::size_t pvarCount) {
    return std::max(sigmaSize(formula.spatial), pvarCount);
}

std::size_t treewidthBound(const RecursiveSystem& system) {
    if (!checkEstablishment(system).empty()) throw Error("the tree-width bound needs an established system");
    return system.varCount();
}

std::size_t treewidthBound(const TopLevelFormula& formula, const RecursiveSystem& system, std::size_t pvarCount) {
    return std::max({formula.bound.size(), sigmaSize(formula.basic.spatial), pvarCount, treewidthBound(system)});
}

TreeDecomposition parseDecomposition(const std::string& text, State& state) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed decomposition: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("bags") || !doc["bags"].is_object())
        throw Error("malformed decomposition: expected {\"bags\": {...}}");
    TreeDecomposition out;
    for (const auto& [key, bag] : doc["bags"].items()) {
        TreePosition pos;
        if (key != "e") {
            std::size_t start = 0;
            while (start <= key.size()) {
                auto dot = key.find('.', start);
                auto part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
                try {
                    std::size_t used = 0;
                    int v = std::stoi(part, &used);
                    if (used != part.size() || v < 0) throw Error("");
                    pos.push_back(v);
                } catch (...) {
                    throw Error("malformed decomposition: bad position '" + key + "'");
                }
                if (dot == std::string::npos) break;
                start = dot + 1;
            }
        }
        if (!bag.is_array()) throw Error("malformed decomposition: bags must be arrays");
        auto& b = out.bags[pos];
        for (const auto& name : bag) {
            if (!name.is_string()) throw Error("malformed decomposition: locations must be strings");
            b.insert(state.addLocation(name.get<std::string>()));
        }
    }
    return out;
}

std::string printDecomposition(const TreeDecomposition& decomposition, const State& state) {
    nlohmann::ordered_json bags = nlohmann::ordered_json::object();
    for (const auto& [pos, bag] : decomposition.bags) {
        std::vector<std::string> names;
        for (auto l : bag) names.push_back(state.nameOf(l));
        bags[positionToString(pos)] = names;
    }
    nlohmann::ordered_json doc;
    doc["bags"] = bags;
    return doc.dump(2) + "\n";
}

}  // namespace slrd
