#include <algorithm>
#include <cstdint>

#include "slrd/mso.hpp"

namespace slrd {

namespace {

enum class Op { Eq, Var, Edge, Null, In, And, Or, Ex1, Ex2, All1, All2 };

struct CNode {
    explicit CNode(Op o) : op(o) {}

    Op op;
    bool neg = false;
    int a = -1;  // first-order slot
    int b = -1;  // first-order slot (Eq, Edge) or set slot (In)
    int sel = 0;
    int target = -1;  // Var: universe index of the program variable, -1 if unset
    std::vector<int> kids;
    int slot = -1;
    int guard = -1;  // set slot bounding the quantified range
    std::vector<int> free;  // 2 * slot (+1 for sets), sorted
    std::size_t size = 1;
};

std::vector<int> unite(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

class Compiler {
public:
    Compiler(const State& state, const SOInterpretation& interp, std::size_t cap) : state_(state), interp_(interp) {
        std::set<Location> universe = state.locations();
        universe.insert(kNull);
        for (const auto& [v, l] : interp.first) universe.insert(l);
        for (const auto& [v, ls] : interp.second) universe.insert(ls.begin(), ls.end());
        if (universe.size() > cap || universe.size() > 63)
            throw EvalCapExceeded("evaluation universe has " + std::to_string(universe.size()) + " locations, cap is " +
                        std::to_string(std::min<std::size_t>(cap, 63)));
        universe_.assign(universe.begin(), universe.end());
        for (std::size_t i = 0; i < universe_.size(); ++i) index_[universe_[i]] = static_cast<int>(i);
    }

    int compile(const MsoNode& n, bool pos) {
        switch (n.kind) {
            case MsoKind::Eq: {
                CNode c(Op::Eq);
                c.a = fo(n.x);
                c.b = fo(n.y);
                return literal(std::move(c), pos);
            }
            case MsoKind::Var: {
                CNode c(Op::Var);
                c.a = fo(n.y);
                if (auto l = state_.lookup(n.x)) c.target = index_.at(*l);
                return literal(std::move(c), pos);
            }
            case MsoKind::Edge: {
                CNode c(Op::Edge);
                c.a = fo(n.x);
                c.b = fo(n.y);
                c.sel = n.selector;
                return literal(std::move(c), pos);
            }
            case MsoKind::Null: {
                CNode c(Op::Null);
                c.a = fo(n.x);
                return literal(std::move(c), pos);
            }
            case MsoKind::In: {
                CNode c(Op::In);
                c.a = fo(n.x);
                c.b = so(n.y);
                return literal(std::move(c), pos);
            }
            case MsoKind::Not:
                return compile(*n.kids.front(), !pos);
            case MsoKind::And:
            case MsoKind::Or: {
                std::vector<int> kids;
                for (const auto& k : n.kids) kids.push_back(compile(*k, pos));
                return (n.kind == MsoKind::And) == pos ? makeAnd(kids) : makeOr(kids);
            }
            case MsoKind::Exists1:
            case MsoKind::Forall1:
            case MsoKind::Exists2:
            case MsoKind::Forall2: {
                bool set = n.kind == MsoKind::Exists2 || n.kind == MsoKind::Forall2;
                bool exists = (n.kind == MsoKind::Exists1 || n.kind == MsoKind::Exists2) == pos;
                auto& scope = set ? soScope_ : foScope_;
                int slot = set ? soCount_++ : foCount_++;
                scope[n.x].push_back(slot);
                int body = compile(*n.kids.front(), pos);
                scope[n.x].pop_back();
                Op op = set ? (exists ? Op::Ex2 : Op::All2) : (exists ? Op::Ex1 : Op::All1);
                return makeQuant(op, slot, body);
            }
        }
        throw Error("unknown formula node");
    }

    std::vector<CNode> nodes;
    std::vector<Location> universe_;
    std::map<Location, int> index_;
    std::vector<std::pair<int, int>> foInit;       // slot, universe index
    std::vector<std::pair<int, std::uint64_t>> soInit;  // slot, mask
    int foCount_ = 0;
    int soCount_ = 0;

private:
    int fo(const std::string& name) {
        auto it = foScope_.find(name);
        if (it != foScope_.end() && !it->second.empty()) return it->second.back();
        auto v = interp_.first.find(name);
        if (v == interp_.first.end()) throw Error("first-order variable '" + name + "' is free and uninterpreted");
        int slot = foCount_++;
        foScope_[name].push_back(slot);
        foInit.emplace_back(slot, index_.at(v->second));
        return slot;
    }

    int so(const std::string& name) {
        auto it = soScope_.find(name);
        if (it != soScope_.end() && !it->second.empty()) return it->second.back();
        auto v = interp_.second.find(name);
        if (v == interp_.second.end()) throw Error("set variable '" + name + "' is free and uninterpreted");
        int slot = soCount_++;
        soScope_[name].push_back(slot);
        std::uint64_t mask = 0;
        for (auto l : v->second) mask |= std::uint64_t{1} << index_.at(l);
        soInit.emplace_back(slot, mask);
        return slot;
    }

    int add(CNode c) {
        nodes.push_back(std::move(c));
        return static_cast<int>(nodes.size() - 1);
    }

    int literal(CNode c, bool pos) {
        c.neg = !pos;
        if (c.a >= 0) c.free.push_back(2 * c.a);
        if (c.b >= 0) c.free.push_back(c.op == Op::In ? 2 * c.b + 1 : 2 * c.b);
        std::sort(c.free.begin(), c.free.end());
        c.free.erase(std::unique(c.free.begin(), c.free.end()), c.free.end());
        return add(std::move(c));
    }

    int junction(Op op, const std::vector<int>& in) {
        std::vector<int> kids;
        for (int k : in) {
            const auto& n = nodes[k];
            if (n.op == op) {
                kids.insert(kids.end(), n.kids.begin(), n.kids.end());
            } else if (n.op == (op == Op::And ? Op::Or : Op::And) && n.kids.empty()) {
                return k;  // absorbing constant
            } else {
                kids.push_back(k);
            }
        }
        if (kids.size() == 1) return kids.front();
        std::stable_sort(kids.begin(), kids.end(), [&](int x, int y) { return nodes[x].size < nodes[y].size; });
        CNode c(op);
        for (int k : kids) {
            c.free = unite(c.free, nodes[k].free);
            c.size += nodes[k].size;
        }
        c.kids = std::move(kids);
        return add(std::move(c));
    }

    int makeAnd(const std::vector<int>& kids) { return junction(Op::And, kids); }
    int makeOr(const std::vector<int>& kids) { return junction(Op::Or, kids); }

    bool mentions(int node, int key) const {
        const auto& f = nodes[node].free;
        return std::binary_search(f.begin(), f.end(), key);
    }

    int makeQuant(Op op, int slot, int body) {
        bool set = op == Op::Ex2 || op == Op::All2;
        bool exists = op == Op::Ex1 || op == Op::Ex2;
        int key = 2 * slot + (set ? 1 : 0);
        if (!mentions(body, key)) return body;
        Op distributes = exists ? Op::Or : Op::And;
        Op splits = exists ? Op::And : Op::Or;
        const auto bodyNode = nodes[body];
        if (bodyNode.op == distributes) {
            std::vector<int> parts;
            for (int k : bodyNode.kids) parts.push_back(makeQuant(op, slot, k));
            return junction(distributes, parts);
        }
        if (bodyNode.op == splits) {
            std::vector<int> inside, outside;
            for (int k : bodyNode.kids) (mentions(k, key) ? inside : outside).push_back(k);
            if (!outside.empty()) {
                outside.push_back(rawQuant(op, slot, junction(splits, inside)));
                return junction(splits, outside);
            }
        }
        return rawQuant(op, slot, body);
    }

    int rawQuant(Op op, int slot, int body) {
        CNode c(op);
        c.slot = slot;
        c.kids = {body};
        c.size = 1 + nodes[body].size;
        int key = (op == Op::Ex2 || op == Op::All2) ? 2 * slot + 1 : 2 * slot;
        for (int f : nodes[body].free)
            if (f != key) c.free.push_back(f);
        c.guard = findGuard(op, slot, body);
        return add(std::move(c));
    }

    /// A conjunct X(v) under exists (a disjunct not X(v) under forall) bounds a
    /// first-order range; Z <= S (its negation) bounds a set range.
    int findGuard(Op op, int slot, int body) const {
        bool exists = op == Op::Ex1 || op == Op::Ex2;
        const auto& b = nodes[body];
        std::vector<int> parts;
        if (b.op == (exists ? Op::And : Op::Or))
            parts = b.kids;
        else
            parts = {body};
        for (int k : parts) {
            const auto& n = nodes[k];
            if (op == Op::Ex1 || op == Op::All1) {
                if (n.op == Op::In && n.a == slot && n.neg == !exists) return n.b;
                continue;
            }
            // exists: forall v (not Z(v) or S(v)); forall: exists v (Z(v) and not S(v))
            if (n.op != (exists ? Op::All1 : Op::Ex1)) continue;
            const auto& inner = nodes[n.kids.front()];
            if (inner.op != (exists ? Op::Or : Op::And) || inner.kids.size() != 2) continue;
            int zLit = -1, sLit = -1;
            for (int lk : inner.kids) {
                const auto& l = nodes[lk];
                if (l.op != Op::In || l.a != n.slot) continue;
                if (l.b == slot && l.neg == exists) zLit = lk;
                if (l.b != slot && l.neg != exists) sLit = lk;
            }
            if (zLit >= 0 && sLit >= 0) return nodes[sLit].b;
        }
        return -1;
    }

    const State& state_;
    const SOInterpretation& interp_;
    std::map<std::string, std::vector<int>> foScope_;
    std::map<std::string, std::vector<int>> soScope_;
};

class Evaluator {
public:
    Evaluator(const Compiler& c, const State& state, int maxSel) : nodes_(c.nodes) {
        std::size_t n = c.universe_.size();
        full_ = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
        nullIdx_ = c.index_.at(kNull);
        edges_.assign(maxSel + 1, std::vector<int>(n, -1));
        for (const auto& [l, cell] : state.heap)
            for (const auto& [k, t] : cell)
                if (k <= maxSel) edges_[k][c.index_.at(l)] = c.index_.at(t);
        fo_.assign(c.foCount_, 0);
        so_.assign(c.soCount_, 0);
        for (auto [s, v] : c.foInit) fo_[s] = v;
        for (auto [s, m] : c.soInit) so_[s] = m;
        size_ = static_cast<int>(n);
    }

    bool eval(int i) {
        const CNode& n = nodes_[i];
        switch (n.op) {
            case Op::Eq:
                return (fo_[n.a] == fo_[n.b]) != n.neg;
            case Op::Var:
                return (fo_[n.a] == n.target) != n.neg;
            case Op::Edge:
                return (n.sel < static_cast<int>(edges_.size()) && edges_[n.sel][fo_[n.a]] == fo_[n.b]) != n.neg;
            case Op::Null:
                return (fo_[n.a] == nullIdx_) != n.neg;
            case Op::In:
                return (((so_[n.b] >> fo_[n.a]) & 1) != 0) != n.neg;
            case Op::And:
                for (int k : n.kids)
                    if (!eval(k)) return false;
                return true;
            case Op::Or:
                for (int k : n.kids)
                    if (eval(k)) return true;
                return false;
            case Op::Ex1:
            case Op::All1: {
                bool exists = n.op == Op::Ex1;
                std::uint64_t range = n.guard >= 0 ? so_[n.guard] : full_;
                for (int v = 0; v < size_; ++v) {
                    if (!((range >> v) & 1)) continue;
                    fo_[n.slot] = v;
                    if (eval(n.kids.front()) == exists) return exists;
                }
                return !exists;
            }
            case Op::Ex2:
            case Op::All2: {
                bool exists = n.op == Op::Ex2;
                std::uint64_t range = n.guard >= 0 ? so_[n.guard] : full_;
                for (std::uint64_t m = range;; m = (m - 1) & range) {
                    so_[n.slot] = m;
                    if (eval(n.kids.front()) == exists) return exists;
                    if (m == 0) break;
                }
                return !exists;
            }
        }
        return false;
    }

private:
    const std::vector<CNode>& nodes_;
    std::vector<std::vector<int>> edges_;
    std::vector<int> fo_;
    std::vector<std::uint64_t> so_;
    std::uint64_t full_ = 0;
    int nullIdx_ = 0;
    int size_ = 0;
};

int maxSelector(const MsoNode& n) {
    int m = n.kind == MsoKind::Edge ? n.selector : 0;
    for (const auto& k : n.kids) m = std::max(m, maxSelector(*k));
    return m;
}

}  // namespace

bool evalMSO(const State& state, const Mso& formula, const SOInterpretation& interp, std::size_t cap) {
    Compiler compiler(state, interp, cap);
    int root = compiler.compile(*formula, true);
    int maxSel = maxSelector(*formula);
    for (const auto& [l, cell] : state.heap)
        for (const auto& [k, t] : cell) maxSel = std::max(maxSel, k);
    Evaluator evaluator(compiler, state, maxSel);
    return evaluator.eval(root);
}

}  // namespace slrd
