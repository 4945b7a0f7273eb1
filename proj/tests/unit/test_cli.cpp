#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <sys/wait.h>

#include "slrd/parser.hpp"
#include "slrd/state.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(const std::string& args, bool withStderr = false, const std::string& env = "") {
    std::string cmd = env + std::string(SLRD_CLI) + " " + args + (withStderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string corpus(const char* name) { return oracle::corpusPath(name); }

fs::path scratch() {
    auto dir = fs::temp_directory_path() / ("slrd_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("check") {
    auto ok = run("check " + corpus("tll.slrd"));
    CHECK(ok.code == 0);
    CHECK(ok.out.find("F(tll/R2, 1, tll/R2) = {1}") != std::string::npos);
    auto bad = run("check " + corpus("llextra.slrd"));
    CHECK(bad.code == 1);
    CHECK(bad.out.find("'e'") != std::string::npos);
    auto json = run("--json check " + corpus("ls.slrd"));
    CHECK(json.code == 1);
    CHECK(json.out.find("\"wellformed\": false") != std::string::npos);
}

TEST_CASE("sat and entail") {
    auto dir = scratch();
    auto sat = run("sat " + corpus("tll.slrd") + " --formula phi1 --bound 1 -o " + (dir / "w.state.json").string() +
                   " --dot " + (dir / "w.dot").string());
    CHECK(sat.code == 0);
    CHECK(sat.out.rfind("SAT", 0) == 0);
    auto witness = slrd::parseStateFile((dir / "w.state.json").string());
    CHECK(witness.heap.size() == 1);
    CHECK(slrd::readFile((dir / "w.dot").string()).find("digraph") == 0);

    auto unsat = run("sat " + corpus("infinite.slrd") + " --formula some");
    CHECK(unsat.code == 1);
    CHECK(unsat.out.rfind("UNSAT_UP_TO (bound 6", 0) == 0);

    auto cex = run("entail " + corpus("tll.slrd") + " --lhs phi1 --rhs phi2 --bound 3 -o " +
                   (dir / "cex.state.json").string());
    CHECK(cex.code == 1);
    CHECK(slrd::parseStateFile((dir / "cex.state.json").string()).heap.size() == 1);

    auto valid = run("--json entail " + corpus("tll.slrd") + " --lhs phi2 --rhs phi1 --bound 5");
    CHECK(valid.code == 0);
    CHECK(valid.out.find("\"verdict\": \"VALID_UP_TO\"") != std::string::npos);

    CHECK(run("sat " + corpus("llextra.slrd") + " --formula nothing").code == 3);
    fs::remove_all(dir);
}

TEST_CASE("modelcheck") {
    auto dir = scratch();
    auto single = (dir / "one.state.json").string();
    {
        std::ofstream(single) << R"({"store":{"root":"c","head":"c"},"heap":{"c":{"1":"null","2":"null","3":"null","4":"null"}}})";
    }
    CHECK(run("modelcheck " + single + " " + corpus("tll.slrd") + " --formula phi1").code == 0);
    CHECK(run("modelcheck " + single + " " + corpus("tll.slrd") + " --formula phi2").code == 1);
    CHECK(run("modelcheck " + single + " " + corpus("tll.slrd") + " --formula phi1 --mso").code == 0);
    CHECK(run("modelcheck " + single + " " + corpus("tll.slrd") + " --formula phi1 --mso --eval-cap 1").code == 2);
    CHECK(run("modelcheck " + single + " " + corpus("tll.slrd") + " --formula phi1 --mso", false, "SLRD_EVAL_CAP=1 ")
              .code == 2);
    fs::remove_all(dir);
}

TEST_CASE("emit-mso") {
    auto dir = scratch();
    auto out = (dir / "phi.mso").string();
    CHECK(run("emit-mso " + corpus("list_nonempty.slrd") + " --formula seg -o " + out).code == 0);
    auto text = slrd::readFile(out);
    CHECK(text.find("(exists1 x_a") == 0);
    CHECK(run("emit-mso " + corpus("list_nonempty.slrd") + " --formula seg").out == text);
    fs::remove_all(dir);
}

TEST_CASE("treewidth") {
    auto grid = corpus("fig2.state.json");
    auto exact = run("treewidth " + grid + " --exact");
    CHECK(exact.code == 0);
    CHECK(exact.out.rfind("treewidth 2\n", 0) == 0);
    CHECK(run("treewidth " + grid + " --validate " + corpus("fig2.decomp.json")).code == 0);
    auto broken = run("treewidth " + grid + " --validate " + corpus("fig2.broken.decomp.json"));
    CHECK(broken.code == 1);
    CHECK(broken.out.find("condition 2") != std::string::npos);
    CHECK(run("--json treewidth " + grid).out.find("\"treewidth\": 2") != std::string::npos);
}

TEST_CASE("unfold") {
    auto dir = scratch();
    auto res = run("unfold " + corpus("tll.slrd") + " --pred tll --max-nodes 5 --emit-models " + dir.string());
    CHECK(res.code == 0);
    CHECK(std::count(res.out.begin(), res.out.end(), '\n') == 4);
    CHECK(fs::exists(dir / "tll_4.state.json"));
    CHECK(slrd::parseStateFile((dir / "tll_4.state.json").string()).heap.size() == 5);
    auto da = run("unfold " + corpus("double_alloc.slrd") + " --pred P --max-nodes 3");
    CHECK(da.out.find("double-allocation") != std::string::npos);
    CHECK(run("unfold " + corpus("tll.slrd") + " --pred nope --max-nodes 3").code == 3);
    fs::remove_all(dir);
}

TEST_CASE("usage errors") {
    auto unknown = run("check --frobnicate " + corpus("tll.slrd"), true);
    CHECK(unknown.code == 3);
    CHECK(unknown.out.find("Usage:") != std::string::npos);
    CHECK(run("frobnicate", true).code == 3);
    CHECK(run("", true).code == 3);
    CHECK(run("check /nonexistent/file.slrd").code == 3);
    CHECK(run("treewidth " + corpus("tll.slrd")).code == 3);
    CHECK(run("--help").code == 0);
}
