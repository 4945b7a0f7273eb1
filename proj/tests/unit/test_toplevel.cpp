#include <doctest.h>

#include "slrd/toplevel.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace slrd;

namespace {

// list'(a, b): the heap is one chain of unary cells from a ending in a pointer to b.
bool isListSegment(const State& s) {
    Location cur = s.store.at("a");
    std::set<Location> seen;
    for (std::size_t i = 0; i < s.heap.size(); ++i) {
        auto it = s.heap.find(cur);
        if (it == s.heap.end() || it->second.size() != 1 || !seen.insert(cur).second) return false;
        cur = it->second.begin()->second;
    }
    return !s.heap.empty() && cur == s.store.at("b");
}

}  // namespace

TEST_CASE("single-cell tll model") {
    auto tll = oracle::corpus("tll.slrd");
    auto s = parseState(R"({"store":{"root":"c","head":"c"},"heap":{"c":{"1":"null","2":"null","3":"null","4":"null"}}})");
    CHECK(checkTopLevel(s, tll.formula("phi1"), tll.system));
    CHECK_FALSE(checkTopLevel(s, tll.formula("phi2"), tll.system));
}

TEST_CASE("list segments agree with a direct walk on all small states") {
    auto doc = oracle::corpus("list_nonempty.slrd");
    const auto& seg = doc.formula("seg");
    std::size_t states = 0, models = 0;
    for (std::size_t cells = 0; cells <= 3; ++cells)
        oracle::forEachState(3, cells, 1, {"a", "b"}, [&](const State& s) {
            ++states;
            bool expected = isListSegment(s);
            models += expected;
            CHECK(checkTopLevel(s, seg, doc.system) == expected);
        });
    CHECK(states > 1000);
    CHECK(models > 10);
}

TEST_CASE("combined formulas") {
    auto tll = oracle::corpus("tll.slrd");
    auto leaf = makeTree(tll.system, 0, TreeShape{0, {}});
    auto f = combineTopLevel(tll.formula("phi2"), {&leaf, &leaf}, tll.system);
    CHECK(f.spatial.atoms.size() == 3);
    CHECK(basicSat(f).sat());
    CHECK_THROWS_AS(combineTopLevel(tll.formula("phi2"), {&leaf}, tll.system), Error);
}

TEST_CASE("compositions") {
    std::vector<std::vector<std::size_t>> seen;
    forEachComposition(4, 2, [&](const std::vector<std::size_t>& s) {
        seen.push_back(s);
        return false;
    });
    CHECK(seen == std::vector<std::vector<std::size_t>>{{1, 3}, {2, 2}, {3, 1}});
    CHECK(forEachComposition(0, 0, [](const auto&) { return true; }));
    CHECK_FALSE(forEachComposition(1, 2, [](const auto&) { return true; }));
}

TEST_CASE("model checking predicates needs progress") {
    auto fig1 = oracle::corpus("fig1.slrd");
    TopLevelFormula f;
    f.occurrences.push_back({0, {Variable::logical("a"), Variable::logical("b")}});
    CHECK_THROWS_AS(checkTopLevel(State{}, f, fig1.system), Error);
}
