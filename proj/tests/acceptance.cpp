// Acceptance runner: one PASS/FAIL line per criterion.

#include <array>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

#include "slrd/decision.hpp"
#include "slrd/toplevel.hpp"
#include "slrd/translate.hpp"
#include "slrd/treewidth.hpp"
#include "slrd/wellformed.hpp"
#include "support/checks.hpp"
#include "support/fixtures.hpp"

using namespace slrd;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

std::pair<int, std::string> run(const std::string& args) {
    std::string cmd = std::string(SLRD_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    std::array<char, 65536> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

void wellformednessCorpus(Outcome& o) {
    struct Expect {
        const char* file;
        bool progress, connectivity, establishment;
    };
    for (auto e : {Expect{"tll", true, true, true}, Expect{"ls", false, false, true},
                   Expect{"llextra", true, true, false}, Expect{"fig1", false, false, false},
                   Expect{"list_nonempty", true, true, true}, Expect{"dll_nonempty", true, true, true},
                   Expect{"tree_nonempty", true, true, true}}) {
        auto doc = oracle::corpus(std::string(e.file) + ".slrd");
        auto report = checkWellformed(doc.system);
        o.require(report.progress.empty() == e.progress, std::string(e.file) + " progress");
        if (e.progress) o.require(report.connectivity.empty() == e.connectivity, std::string(e.file) + " connectivity");
        o.require(report.establishment.empty() == e.establishment, std::string(e.file) + " establishment");
        o.require(reportText(report, doc.system) == readFile(oracle::goldenPath(std::string("check_") + e.file + ".txt")),
                  std::string(e.file) + " golden");
    }
    auto fig1 = checkProgress(oracle::corpus("fig1.slrd").system);
    bool allBase = fig1.size() == 3;
    for (const auto& v : fig1) allBase = allBase && v.rule == 0;
    o.require(allBase, "fig1 base cases");
    auto ext = checkEstablishment(oracle::corpus("llextra.slrd").system);
    o.require(ext.size() == 1 && ext[0].message.find("'e'") != std::string::npos, "llextra names e");
    o.detail << "7 corpus reports byte-equal to goldens";
}

void fsets(Outcome& o) {
    auto doc = oracle::corpus("tll.slrd");
    auto text = reportText(checkWellformed(doc.system), doc.system);
    std::string picked;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        auto pos = line.find("F(tll/R2, ");
        if (pos != std::string::npos && line.find(", tll/R2) =") != std::string::npos) picked += line.substr(pos) + "\n";
    }
    o.require(picked == readFile(oracle::goldenPath("tll_fsets.txt")), "F-set golden");
    auto table = localSelectors(doc.system);
    o.require(table.at({0, 1, 0, 1}) == std::set<int>{1} && table.at({0, 1, 1, 1}) == std::set<int>{2}, "F-set values");
    o.detail << "F(R2,1,R2)={1}, F(R2,2,R2)={2}";
}

void routing(Outcome& o) {
    std::size_t queries = 0, trees = 0;
    for (auto name : {"tll.slrd", "list_nonempty.slrd"}) {
        auto t = checks::routingAgreement(oracle::corpus(name).system, 7);
        o.require(t.mismatches == 0, std::string(name) + " mismatches " + std::to_string(t.mismatches));
        queries += t.queries;
        trees += t.trees;
    }
    o.detail << trees << " trees, " << queries << " queries, 0 mismatches";
}

void doubleAlloc(Outcome& o) {
    std::size_t trees = 0, hits = 0;
    for (auto name : {"tll.slrd", "list_nonempty.slrd", "dll_nonempty.slrd", "tree_nonempty.slrd", "double_alloc.slrd"}) {
        auto t = checks::doubleAllocAgreement(oracle::corpus(name).system, 7);
        o.require(t.mismatches == 0, std::string(name) + " mismatches");
        trees += t.trees;
        hits += t.positives;
    }
    o.require(hits > 0, "the y=z system double-allocates");
    o.detail << trees << " trees, " << hits << " double allocations, 0 mismatches";
}

void basicTranslation(Outcome& o) {
    auto t = checks::basicTranslationAgreement(2025, 200);
    o.require(t.mismatches == 0, std::to_string(t.mismatches) + " disagreements");
    o.require(t.positives > 0 && t.positives < t.queries, "both verdicts occur");
    o.detail << t.queries - t.mismatches << "/" << t.queries << " agree (" << t.positives << " satisfied)";
}

void replay(Outcome& o) {
    std::size_t replayed = 0;
    for (auto name : {"tll.slrd", "list_nonempty.slrd", "dll_nonempty.slrd", "tree_nonempty.slrd"}) {
        auto doc = oracle::corpus(name);
        std::size_t limit = std::string(name) == "tree_nonempty.slrd" ? 5 : 7;
        for (const auto& t : enumerateTrees(doc.system, 0, limit)) {
            auto m = buildModel(t, doc.system);
            auto [f, interp] = fixture::rootCall(doc.system, t, m);
            o.require(m.ok() && checkTopLevel(m.state, f, doc.system, interp), "model of " + treeToString(t, doc.system));
            ++replayed;
        }
    }
    auto small = oracle::corpus("sat_small.slrd");
    for (const auto& named : small.formulas) {
        auto v = satBounded(named.formula, small.system, 5);
        if (!v.witness) continue;
        o.require(checkTopLevel(*v.witness, named.formula, small.system, v.valuation), "witness of " + named.name);
        ++replayed;
    }

    auto tll = oracle::corpus("tll.slrd");
    const auto& phi1 = tll.formula("phi1");
    auto fig3 = fixture::fig3State(tll.system);
    o.require(fig3.heap.size() == 7, "fig3 has 7 cells");
    o.require(fig3.isomorphic(fixture::fig3Expected()), "fig3 shape");
    o.require(checkTopLevel(fig3, phi1, tll.system), "fig3 satisfies phi1");
    auto sentence = translateSentence(phi1, tll.system);
    o.require(evalMSO(fig3, sentence), "fig3 satisfies the sentence");

    // corruptions of the three-cell model (see README on the seven-cell one)
    TreeShape leaf{0, {}};
    auto t = makeTree(tll.system, 0, TreeShape{1, {leaf, leaf}});
    auto m = buildModel(t, tll.system, std::map<std::string, Location>{{"p", kNull}, {"leaf_r", kNull}});
    State s = m.state;
    s.store["root"] = m.mu[0];
    s.store["head"] = m.valuation.at(Variable::logical("leaf_l").indexed({}));
    o.require(evalMSO(s, sentence), "three-cell model satisfies the sentence");
    std::size_t rejected = 0;
    for (const auto& [l, cell] : s.heap)
        for (const auto& [k, target] : cell) {
            State bad = s;
            bad.heap[l][k] = target == kNull ? l : kNull;
            bool mso = evalMSO(bad, sentence);
            o.require(!mso && !checkTopLevel(bad, phi1, tll.system), "corruption rejected");
            rejected += !mso;
        }
    o.detail << replayed << " models replayed; 7-cell tree model satisfies phi1 and its sentence; " << rejected
             << " corrupted states rejected by evalMSO";
}

void entailment(Outcome& o) {
    auto tll = oracle::corpus("tll.slrd");
    const auto& phi1 = tll.formula("phi1");
    const auto& phi2 = tll.formula("phi2");
    auto r = entail(phi1, phi2, tll.system, 1);
    o.require(r.kind == VerdictKind::Refuted && r.witness && r.witness->heap.size() == 1, "phi1 |= phi2 refuted by 1 cell");
    if (r.witness)
        o.require(checkTopLevel(*r.witness, phi1, tll.system) && !checkTopLevel(*r.witness, phi2, tll.system),
                  "counterexample replays");
    auto v = entail(phi2, phi1, tll.system, 7);
    o.require(v.kind == VerdictKind::ValidUpTo && v.bound == 7, "phi2 |= phi1 valid up to 7");
    o.detail << "REFUTED with 1 cell; VALID_UP_TO(7) over " << v.candidates << " lhs tree tuples";
}

void treewidth(Outcome& o) {
    std::size_t models = 0;
    int worstTll = 0;
    auto tll = oracle::corpus("tll.slrd");
    auto tllBound = treewidthBound(tll.system);
    o.require(tllBound == 7, "tll bound is 7");
    for (const auto& t : enumerateTrees(tll.system, 0, 7)) {
        auto m = buildModel(t, tll.system);
        auto r = exactTreewidth(m.state);
        o.require(static_cast<std::size_t>(r.width) <= tllBound && validateDecomposition(m.state, r.witness).ok(),
                  "tll model within bound");
        worstTll = std::max(worstTll, r.width);
        ++models;
    }
    auto list = oracle::corpus("list_nonempty.slrd");
    auto listBound = treewidthBound(list.system);
    for (const auto& t : enumerateTrees(list.system, 0, 7)) {
        auto m = buildModel(t, list.system);
        auto r = exactTreewidth(m.state);
        o.require(r.width == 1 && static_cast<std::size_t>(r.width) <= listBound, "list' model has treewidth 1");
        ++models;
    }
    auto grid = parseStateFile(oracle::corpusPath("fig2.state.json"));
    auto d = validateDecomposition(grid, parseDecomposition(readFile(oracle::corpusPath("fig2.decomp.json")), grid));
    o.require(d.ok() && *d.width == 2 && exactTreewidth(grid).width == 2, "grid decomposition width 2");
    o.detail << models << " models; tll max " << worstTll << " <= " << tllBound << ", list' 1 <= " << listBound
             << "; grid decomposition width 2";
}

void unsatRecursion(Outcome& o) {
    auto inf = oracle::corpus("infinite.slrd");
    for (std::size_t b = 1; b <= 10; ++b) {
        auto v = satBounded(inf.formula("some"), inf.system, b);
        o.require(v.kind == VerdictKind::UnsatUpTo && v.bound == b, "UNSAT_UP_TO(" + std::to_string(b) + ")");
        o.require(enumerateTrees(inf.system, 0, b).empty(), "no trees at " + std::to_string(b));
    }
    o.detail << "UNSAT_UP_TO(b) and no trees for b = 1..10";
}

void determinism(Outcome& o) {
    std::string tll = oracle::corpusPath("tll.slrd");
    std::string small = oracle::corpusPath("sat_small.slrd");
    std::vector<std::string> commands{
        "check " + tll,
        "--json check " + tll,
        "check " + oracle::corpusPath("fig1.slrd"),
        "sat " + tll + " --formula phi2 --bound 6",
        "--json sat " + small + " --formula three --bound 6",
        "entail " + tll + " --lhs phi1 --rhs phi2 --bound 3",
        "--json entail " + tll + " --lhs phi2 --rhs phi1 --bound 6",
        "emit-mso " + tll + " --formula phi1",
        "emit-mso " + small + " --formula cycle",
    };
    std::size_t compared = 0;
    for (const auto& cmd : commands) {
        auto first = run(cmd);
        auto second = run(cmd);
        o.require(first == second && !first.second.empty(), "rerun of: " + cmd);
        ++compared;
        if (cmd.find(" sat ") != std::string::npos || cmd.find(" entail ") != std::string::npos ||
            cmd.rfind("sat ", 0) == 0 || cmd.rfind("entail ", 0) == 0)
            for (const char* threads : {" --threads 2", " --threads 4"}) {
                o.require(run(cmd + threads) == first, "threads: " + cmd + threads);
                ++compared;
            }
    }
    auto cex = run("entail " + tll + " --lhs phi1 --rhs phi2 --bound 3");
    o.require(cex.first == 1 && cex.second.find("REFUTED") == 0, "entail exit 1");
    o.require(run("check " + tll).first == 0, "check exit 0");
    o.require(run("check " + oracle::corpusPath("llextra.slrd")).first == 1, "llextra exit 1");
    o.detail << compared << " invocations byte-identical across reruns and thread counts";
}

}  // namespace

int main() {
    using Check = void (*)(Outcome&);
    std::vector<std::pair<const char*, Check>> criteria{
        {"well-formedness corpus", wellformednessCorpus},
        {"F-set exactness", fsets},
        {"routing automata vs equality closure", routing},
        {"double allocation automaton vs models", doubleAlloc},
        {"basic translation vs model checking", basicTranslation},
        {"model replay", replay},
        {"entailment example", entailment},
        {"tree-width bounds", treewidth},
        {"unsatisfiable recursion", unsatRecursion},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "[exception: " << e.what() << "]";
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %zu (%s): %s - %s (%.1fs)\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                    o.detail.str().c_str(), secs);
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
