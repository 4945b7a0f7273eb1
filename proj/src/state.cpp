#include "slrd/state.hpp"

#include <functional>
#include <json.hpp>

#include "slrd/parser.hpp"

namespace slrd {

Location State::addLocation(const std::string& name) {
    if (name == "null") return kNull;
    if (auto existing = locationNamed(name)) return *existing;
    names.push_back(name);
    return static_cast<Location>(names.size() - 1);
}

std::optional<Location> State::locationNamed(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<Location>(i);
    return std::nullopt;
}

std::optional<Location> State::lookup(const std::string& programVar) const {
    if (programVar == "nil") return kNull;
    auto it = store.find(programVar);
    if (it == store.end()) return std::nullopt;
    return it->second;
}

std::set<Location> State::domain() const {
    std::set<Location> out;
    for (const auto& [l, cell] : heap) out.insert(l);
    return out;
}

std::set<Location> State::image() const {
    std::set<Location> out;
    for (const auto& [l, cell] : heap)
        for (const auto& [k, t] : cell) out.insert(t);
    return out;
}

std::set<Location> State::locations() const {
    std::set<Location> out = domain();
    for (auto l : image()) out.insert(l);
    for (const auto& [u, l] : store) out.insert(l);
    return out;
}

std::set<Location> State::dangling() const {
    std::set<Location> out;
    auto dom = domain();
    for (auto l : locations())
        if (!dom.count(l)) out.insert(l);
    return out;
}

void State::validate() const {
    if (heap.count(kNull)) throw Error("null cannot be allocated");
    for (const auto& [l, cell] : heap) {
        if (cell.empty()) throw Error("allocated location '" + nameOf(l) + "' has no outgoing selector");
        for (const auto& [k, t] : cell)
            if (k < 1) throw Error("selectors start at 1");
    }
}

bool State::isomorphic(const State& other) const {
    if (store.size() != other.store.size() || heap.size() != other.heap.size()) return false;
    auto mineSet = locations();
    std::vector<Location> mine(mineSet.begin(), mineSet.end());
    auto theirsSet = other.locations();
    if (mine.size() != theirsSet.size()) return false;

    std::map<Location, Location> fwd{{kNull, kNull}};
    std::map<Location, Location> bwd{{kNull, kNull}};
    auto bind = [&](Location a, Location b) {
        auto f = fwd.find(a);
        auto g = bwd.find(b);
        if (f != fwd.end() || g != bwd.end()) return f != fwd.end() && g != bwd.end() && f->second == b;
        fwd[a] = b;
        bwd[b] = a;
        return true;
    };
    for (const auto& [u, l] : store) {
        auto it = other.store.find(u);
        if (it == other.store.end() || !bind(l, it->second)) return false;
    }

    std::function<bool(std::size_t)> extend = [&](std::size_t i) -> bool {
        if (i == mine.size()) {
            for (const auto& [l, cell] : heap) {
                auto it = other.heap.find(fwd.at(l));
                if (it == other.heap.end() || it->second.size() != cell.size()) return false;
                for (const auto& [k, t] : cell) {
                    auto e = it->second.find(k);
                    if (e == it->second.end() || e->second != fwd.at(t)) return false;
                }
            }
            return true;
        }
        Location a = mine[i];
        if (fwd.count(a)) return extend(i + 1);
        for (auto b : theirsSet) {
            if (bwd.count(b)) continue;
            if (heap.count(a) != other.heap.count(b)) continue;
            fwd[a] = b;
            bwd[b] = a;
            if (extend(i + 1)) return true;
            fwd.erase(a);
            bwd.erase(b);
        }
        return false;
    };
    return extend(0);
}

State parseState(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed state document: ") + e.what());
    }
    if (!doc.is_object()) throw Error("malformed state document: expected an object");
    State s;
    auto loc = [&](const nlohmann::json& v) {
        if (!v.is_string()) throw Error("malformed state document: locations must be strings");
        return s.addLocation(v.get<std::string>());
    };
    for (const auto& [key, value] : doc.items())
        if (key != "store" && key != "heap") throw Error("malformed state document: unknown key '" + key + "'");
    if (doc.contains("store")) {
        if (!doc["store"].is_object()) throw Error("malformed state document: store must be an object");
        for (const auto& [var, value] : doc["store"].items()) {
            Location l = loc(value);
            if (var == "nil") {
                if (l != kNull) throw Error("nil must map to null");
                continue;
            }
            s.store[var] = l;
        }
    }
    if (doc.contains("heap")) {
        if (!doc["heap"].is_object()) throw Error("malformed state document: heap must be an object");
        for (const auto& [name, cell] : doc["heap"].items()) {
            if (name == "null") throw Error("null cannot be allocated");
            if (!cell.is_object()) throw Error("malformed state document: heap cells must be objects");
            if (cell.empty()) throw Error("allocated location '" + name + "' has no outgoing selector");
            Location src = s.addLocation(name);
            auto& out = s.heap[src];
            for (const auto& [sel, target] : cell.items()) {
                int k = 0;
                try {
                    std::size_t used = 0;
                    k = std::stoi(sel, &used);
                    if (used != sel.size()) throw Error("");
                } catch (...) {
                    throw Error("malformed state document: selector '" + sel + "' is not a number");
                }
                if (k < 1) throw Error("selectors start at 1");
                out[k] = loc(target);
            }
        }
    }
    s.validate();
    return s;
}

State parseStateFile(const std::string& path) { return parseState(readFile(path)); }

namespace {

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

std::string printState(const State& state) {
    std::string out = "{\n  \"store\": {";
    bool first = true;
    for (const auto& [u, l] : state.store) {
        out += first ? "" : ", ";
        out += quote(u) + ": " + quote(state.nameOf(l));
        first = false;
    }
    out += "},\n  \"heap\": {";
    first = true;
    for (const auto& [l, cell] : state.heap) {
        out += first ? "\n" : ",\n";
        out += "    " + quote(state.nameOf(l)) + ": {";
        bool firstSel = true;
        for (const auto& [k, t] : cell) {
            out += firstSel ? "" : ", ";
            out += quote(std::to_string(k)) + ": " + quote(state.nameOf(t));
            firstSel = false;
        }
        out += "}";
        first = false;
    }
    out += first ? "}\n}\n" : "\n  }\n}\n";
    return out;
}

std::string printDot(const State& state) {
    std::map<Location, std::vector<std::string>> labels;
    for (const auto& [u, l] : state.store) labels[l].push_back(u);
    std::string out = "digraph state {\n  node [shape=box];\n";
    for (auto l : state.locations()) {
        std::string label = state.nameOf(l);
        for (std::size_t i = 0; i < labels[l].size(); ++i) label += (i ? ", " : ": ") + labels[l][i];
        out += "  " + quote(state.nameOf(l)) + " [label=" + quote(label) + "];\n";
    }
    for (const auto& [l, cell] : state.heap)
        for (const auto& [k, t] : cell)
            out += "  " + quote(state.nameOf(l)) + " -> " + quote(state.nameOf(t)) + " [label=\"" +
                   std::to_string(k) + "\"];\n";
    out += "}\n";
    return out;
}

}  // namespace slrd
