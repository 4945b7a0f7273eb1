#include <doctest.h>

#include "slrd/toplevel.hpp"
#include "slrd/unfolding.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace slrd;

namespace {

Variable at(const char* name, TreePosition pos) { return Variable::logical(name).indexed(pos); }

std::size_t catalan(std::size_t n) {
    std::vector<std::size_t> c(n + 1, 0);
    c[0] = 1;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 0; j < i; ++j) c[i] += c[j] * c[i - 1 - j];
    return c[n];
}

// tree' nodes: leaf, left child only, right child only, or both.
std::size_t treePrimeCount(std::size_t n) {
    std::vector<std::size_t> t(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        t[i] = (i == 1) + 2 * t[i - 1];
        for (std::size_t a = 1; a + 1 < i; ++a) t[i] += t[a] * t[i - 1 - a];
    }
    return t[n];
}

}  // namespace

TEST_CASE("tree counts match closed forms") {
    auto tll = oracle::corpus("tll.slrd");
    for (std::size_t n = 1; n <= 11; ++n) {
        CAPTURE(n);
        CHECK(treesOfSize(tll.system, 0, n).size() == (n % 2 ? catalan((n - 1) / 2) : 0));
    }
    std::map<std::size_t, std::size_t> bySize;
    for (const auto& t : enumerateTrees(tll.system, 0, 7)) ++bySize[t.size()];
    CHECK(bySize == std::map<std::size_t, std::size_t>{{1, 1}, {3, 1}, {5, 2}, {7, 5}});

    auto list = oracle::corpus("list_nonempty.slrd");
    auto chains = enumerateTrees(list.system, 0, 5);
    REQUIRE(chains.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(chains[i].size() == i + 1);

    auto tree = oracle::corpus("tree_nonempty.slrd");
    for (std::size_t n = 1; n <= 6; ++n) CHECK(treesOfSize(tree.system, 0, n).size() == treePrimeCount(n));

    auto inf = oracle::corpus("infinite.slrd");
    for (std::size_t b = 0; b <= 12; ++b) CHECK(enumerateTrees(inf.system, 0, b).empty());
}

TEST_CASE("enumeration order is by size then breadth-first rule sequence") {
    auto tree = oracle::corpus("tree_nonempty.slrd");
    auto all = enumerateTrees(tree.system, 0, 5);
    for (std::size_t i = 1; i < all.size(); ++i) {
        bool ordered = all[i - 1].size() < all[i].size() ||
                       (all[i - 1].size() == all[i].size() && all[i - 1].ruleSequence() < all[i].ruleSequence());
        CHECK(ordered);
    }
}

TEST_CASE("characteristic formulas") {
    auto tll = oracle::corpus("tll.slrd");
    const auto& sys = tll.system;

    auto leaf = makeTree(sys, 0, TreeShape{0, {}});
    auto phi = characteristicFormula(leaf, sys);
    REQUIRE(phi.spatial.atoms.size() == 1);
    CHECK((phi.spatial.atoms[0].source == at("x", {})));
    CHECK((phi.spatial.atoms[0].targets ==
           std::vector<Variable>{Variable::nil(), Variable::nil(), at("p", {}), at("leaf_r", {})}));
    CHECK(phi.pure.hasEquality(at("x", {}), at("leaf_l", {})));

    auto fig = characteristicFormula(fixture::fig3Tree(sys), sys);
    CHECK(fig.spatial.atoms.size() == 7);
    CHECK(fig.pure.hasEquality(at("leaf_r", {0, 0}), at("z", {0})));
    CHECK(fig.pure.hasEquality(at("z", {0}), at("leaf_l", {0, 1})));
    CHECK(fig.pure.hasEquality(at("l", {0}), at("x", {0, 0})));
    CHECK(fig.pure.hasEquality(at("x", {0}), at("p", {0, 0})));

    auto list = oracle::corpus("list_nonempty.slrd");
    auto chain = enumerateTrees(list.system, 0, 2)[1];
    auto lphi = characteristicFormula(chain, list.system);
    CHECK(lphi.spatial.atoms.size() == 2);
    CHECK(lphi.pure.hasEquality(at("x", {}), at("hd", {0})));
    CHECK(std::count(lphi.bound.begin(), lphi.bound.end(), at("x", {})) == 1);
}

TEST_CASE("equality closure") {
    auto tll = oracle::corpus("tll.slrd");
    auto cls = equalityClosure(fixture::fig3Tree(tll.system), tll.system);
    CHECK(cls.same(at("leaf_r", {0, 0}), at("z", {0})));
    CHECK(cls.same(at("z", {0}), at("leaf_l", {0, 1})));
    CHECK(cls.same(at("leaf_l", {0, 1}), at("x", {0, 1})));
    CHECK_FALSE(cls.same(at("x", {0, 0}), at("x", {0, 1})));

    auto leaf = equalityClosure(makeTree(tll.system, 0, TreeShape{0, {}}), tll.system);
    CHECK(leaf.same(at("x", {}), at("leaf_l", {})));

    auto list = oracle::corpus("list_nonempty.slrd");
    auto lc = equalityClosure(enumerateTrees(list.system, 0, 2)[1], list.system);
    CHECK(lc.same(at("x", {}), at("hd", {0})));
}

TEST_CASE("built models") {
    auto tll = oracle::corpus("tll.slrd");
    auto s = fixture::fig3State(tll.system);
    CHECK(s.heap.size() == 7);
    CHECK(s.isomorphic(fixture::fig3Expected()));
    CHECK(checkTopLevel(s, tll.formula("phi1"), tll.system));
    CHECK(checkTopLevel(s, tll.formula("phi2"), tll.system));

    auto single = buildModel(makeTree(tll.system, 0, TreeShape{0, {}}), tll.system,
                             std::map<std::string, Location>{{"p", kNull}, {"leaf_r", kNull}});
    CHECK(single.ok());
    CHECK(single.state.heap.size() == 1);

    auto da = oracle::corpus("double_alloc.slrd");
    auto trees = enumerateTrees(da.system, 0, 3);
    REQUIRE(trees.size() == 1);
    CHECK(buildModel(trees[0], da.system).status == BuildStatus::DoubleAllocation);
}

TEST_CASE("every built model replays through checkTopLevel") {
    for (auto name : {"tll.slrd", "list_nonempty.slrd", "dll_nonempty.slrd", "tree_nonempty.slrd"}) {
        CAPTURE(name);
        auto doc = oracle::corpus(name);
        std::size_t limit = std::string(name) == "tree_nonempty.slrd" ? 4 : 7;
        for (const auto& t : enumerateTrees(doc.system, 0, limit)) {
            auto m = buildModel(t, doc.system);
            REQUIRE(m.ok());
            CHECK(m.state.heap.size() == t.size());
            auto [f, interp] = fixture::rootCall(doc.system, t, m);
            CAPTURE(treeToString(t, doc.system));
            CHECK(checkTopLevel(m.state, f, doc.system, interp));
            CHECK(checkBasic(m.state, m.valuation, characteristicFormula(t, doc.system)));
        }
    }
}

TEST_CASE("tree rendering") {
    auto tll = oracle::corpus("tll.slrd");
    auto t = fixture::fig3Tree(tll.system);
    CHECK(treeToString(t, tll.system) == "tll/R2(tll/R2(tll/R1, tll/R1), tll/R2(tll/R1, tll/R1))");
    CHECK(treeToJson(makeTree(tll.system, 0, TreeShape{0, {}}), tll.system) == "[\"tll\",1]");
}
