#include <doctest.h>

#include <random>

#include "slrd/parser.hpp"
#include "support/oracles.hpp"

using namespace slrd;

namespace {

Variable L(const std::string& n) { return Variable::logical(n); }

bool satisfiable(const PureFormula& p, const std::vector<Variable>& vars, int domain,
                 const std::function<bool(const std::map<Variable, int>&)>& extra) {
    std::vector<int> v(vars.size(), 0);
    while (true) {
        std::map<Variable, int> val;
        for (std::size_t i = 0; i < vars.size(); ++i) val[vars[i]] = v[i];
        bool ok = true;
        for (const auto& [a, b] : p.equalities) ok = ok && val[a] == val[b];
        for (const auto& [a, b] : p.disequalities) ok = ok && val[a] != val[b];
        if (ok && extra(val)) return true;
        std::size_t i = 0;
        while (i < v.size() && ++v[i] == domain) v[i++] = 0;
        if (i == v.size()) return false;
    }
}

}  // namespace

TEST_CASE("tree positions print as dotted paths") {
    CHECK(positionToString({}) == "e");
    CHECK(positionToString({0, 1}) == "0.1");
    CHECK(toString(L("x").indexed({})) == "x^e");
    CHECK(toString(L("z").indexed({0, 1})) == "z^0_1");
    CHECK(toString(Variable::nil().indexed({0})) == "nil");
}

TEST_CASE("pure closure") {
    auto a = L("a"), b = L("b"), c = L("c");
    PureFormula p;
    p.addEquality(a, b);
    p.addEquality(b, c);
    auto closed = pureClosure(p, {a, b, c});
    for (auto [x, y] : std::vector<std::pair<Variable, Variable>>{{a, c}, {c, a}, {a, a}, {b, b}, {c, c}})
        CHECK(closed.hasEquality(x, y));

    auto single = pureClosure({}, {a});
    CHECK(single.equalities.size() == 1);
    CHECK(single.hasEquality(a, a));
    CHECK(single.disequalities.empty());

    PureFormula q;
    q.addEquality(a, b);
    q.addDisequality(b, c);
    CHECK(pureClosure(q, {a, b, c}).hasDisequality(a, c));
}

TEST_CASE("pure closure is sound and complete on random inputs") {
    std::mt19937 rng(7);
    std::vector<Variable> vars{L("a"), L("b"), L("c"), L("d")};
    for (int round = 0; round < 300; ++round) {
        PureFormula p;
        int n = std::uniform_int_distribution<int>(0, 4)(rng);
        for (int i = 0; i < n; ++i) {
            auto x = vars[rng() % 4], y = vars[rng() % 4];
            if (rng() % 2) p.addEquality(x, y);
            else p.addDisequality(x, y);
        }
        auto closed = pureClosure(p, {vars.begin(), vars.end()});
        bool consistent = satisfiable(p, vars, 4, [](const auto&) { return true; });
        if (!consistent) continue;
        // every entailed (dis)equality is present; nothing non-entailed is
        for (const auto& x : vars)
            for (const auto& y : vars) {
                bool eqEntailed = !satisfiable(p, vars, 4, [&](const auto& v) { return v.at(x) != v.at(y); });
                CHECK(closed.hasEquality(x, y) == eqEntailed);
                if (closed.hasDisequality(x, y))
                    CHECK_FALSE(satisfiable(p, vars, 4, [&](const auto& v) { return v.at(x) == v.at(y); }));
            }
    }
}

TEST_CASE("spatial size and variable classes") {
    CHECK(sigmaSize({}) == 0);
    auto doc = parseDocument("vars x, y, z; formula f := x -> (y, z); formula g := x -> (y) * y -> (x);");
    CHECK(sigmaSize(doc.formula("f").basic.spatial) == 3);
    CHECK(sigmaSize(doc.formula("g").basic.spatial) == 4);

    auto one = parseDocument("vars x, y; formula f := x -> (y);").formula("f").basic;
    auto cls = classifyVars(one);
    CHECK(cls.allocated == std::set<Variable>{Variable::program("x")});
    CHECK(cls.referenced == std::set<Variable>{Variable::program("y")});

    auto pure = parseDocument("formula f := exists a, b . emp & a = b;").formula("f");
    BasicFormula open = pure.basic;
    open.bound.clear();
    auto pc = classifyVars(open);
    CHECK(pc.allocated.empty());
    CHECK(pc.referenced.empty());
    CHECK(pc.free == std::set<Variable>{L("a"), L("b")});

    auto loop = parseDocument("formula f := exists x . x -> (x);").formula("f");
    BasicFormula lb = loop.basic;
    lb.bound.insert(lb.bound.end(), loop.bound.begin(), loop.bound.end());
    auto lc = classifyVars(lb);
    CHECK(lc.allocated == std::set<Variable>{L("x")});
    CHECK(lc.referenced == std::set<Variable>{L("x")});
    CHECK(lc.free.empty());
}

TEST_CASE("predicates parse into a recursive system") {
    auto doc = parseDocument("pred ls(x,y) := x -> (y) | exists z . x -> (z) * ls(z,y) ;");
    CHECK(doc.system.predicates().size() == 1);
    CHECK(doc.system.predicate(0).rules.size() == 2);

    auto tll = oracle::corpus("tll.slrd");
    const auto& p = tll.system.predicate(0);
    CHECK(p.parameters.size() == 4);
    CHECK(p.rules[1].bound == std::vector<Variable>{L("l"), L("r"), L("z")});
    CHECK(tll.programVars == std::vector<std::string>{"root", "head"});
}

TEST_CASE("syntax errors carry positions") {
    CHECK_THROWS_WITH_AS(parseDocument("pred bad(x) := nil -> (x) ;"), doctest::Contains("nil cannot be allocated"), Error);
    try {
        parseDocument("vars a;\npred P(x) := x -> (");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() > 1);
    }
    CHECK_THROWS_AS(parseDocument("pred P(x) := x -> (y) ;"), Error);
    CHECK_THROWS_AS(parseDocument("pred P(x) := x -> (x) * Q(x) ;"), Error);
    CHECK_THROWS_AS(parseDocument("pred P(x) := x -> (x) ; pred P(y) := y -> (y) ;"), Error);
}

TEST_CASE("printing") {
    CHECK(printFormula(BasicFormula{}) == "emp");
    auto tll = oracle::corpus("tll.slrd");
    CHECK(printRule(tll.system.predicate(0).rules[1], tll.system).find("exists l, r, z .") != std::string::npos);
}

TEST_CASE("print and parse reach a fixpoint on every corpus document") {
    for (auto name : {"tll.slrd", "ls.slrd", "llextra.slrd", "fig1.slrd", "list_nonempty.slrd", "dll_nonempty.slrd",
                      "tree_nonempty.slrd", "infinite.slrd", "double_alloc.slrd"}) {
        CAPTURE(name);
        auto doc = oracle::corpus(name);
        auto once = printDocument(doc);
        auto reparsed = parseDocument(once);
        CHECK(reparsed == doc);
        CHECK(printDocument(reparsed) == once);
    }
}
