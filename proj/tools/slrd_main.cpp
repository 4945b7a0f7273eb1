#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "slrd/decision.hpp"
#include "slrd/mso.hpp"
#include "slrd/parser.hpp"
#include "slrd/state.hpp"
#include "slrd/toplevel.hpp"
#include "slrd/translate.hpp"
#include "slrd/treewidth.hpp"
#include "slrd/unfolding.hpp"
#include "slrd/wellformed.hpp"

using namespace slrd;
using Json = nlohmann::ordered_json;

namespace {

enum Exit { kPositive = 0, kNegative = 1, kUnknown = 2, kInputError = 3 };

void writeFile(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

Json valuationJson(const Interpretation& valuation, const State& state) {
    Json out = Json::object();
    for (const auto& [v, l] : valuation) out[toString(v)] = state.nameOf(l);
    return out;
}

struct VerdictOutputs {
    std::string statePath;
    std::string dotPath;
};

int reportVerdict(const Verdict& v, const RecursiveSystem& system, bool json, const VerdictOutputs& outputs) {
    if (v.witness) {
        if (!outputs.statePath.empty()) writeFile(outputs.statePath, printState(*v.witness));
        if (!outputs.dotPath.empty()) writeFile(outputs.dotPath, printDot(*v.witness));
    }
    if (json) {
        Json doc;
        doc["verdict"] = verdictName(v.kind);
        doc["bound"] = v.bound;
        doc["candidates"] = v.candidates;
        if (v.witness) {
            Json trees = Json::array();
            for (const auto& t : v.trees) trees.push_back(Json::parse(treeToJson(t, system)));
            doc["trees"] = trees;
            doc["valuation"] = valuationJson(v.valuation, *v.witness);
            doc[v.kind == VerdictKind::Sat ? "witness" : "counterexample"] = Json::parse(printState(*v.witness));
        }
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << verdictName(v.kind) << " (bound " << v.bound << ", " << v.candidates << " tree tuples)\n";
        if (v.witness) {
            for (std::size_t j = 0; j < v.trees.size(); ++j)
                std::cout << "tree " << j + 1 << ": " << treeToString(v.trees[j], system) << "\n";
            for (const auto& [var, l] : v.valuation)
                std::cout << toString(var) << " = " << v.witness->nameOf(l) << "\n";
            std::cout << (v.kind == VerdictKind::Sat ? "witness:\n" : "counterexample:\n") << printState(*v.witness);
        }
    }
    return v.kind == VerdictKind::Sat || v.kind == VerdictKind::ValidUpTo ? kPositive : kNegative;
}

std::size_t evalCapFromEnv() {
    if (const char* env = std::getenv("SLRD_EVAL_CAP")) {
        try {
            return static_cast<std::size_t>(std::stoul(env));
        } catch (...) {
            throw Error("SLRD_EVAL_CAP must be a number");
        }
    }
    return kDefaultEvalCap;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bounded-treewidth separation logic toolkit"};
    app.name("slrd");
    app.require_subcommand(1);
    bool json = false;
    app.add_flag("--json", json, "machine-readable output");

    std::string file, stateFile, formulaName, lhsName, rhsName, outPath, dotPath, decompPath, predName, modelsDir;
    std::size_t bound = 6, maxNodes = 5;
    unsigned threads = 1;
    std::size_t evalCap = 0;
    bool exact = false, viaMso = false;

    auto* check = app.add_subcommand("check", "well-formedness report");
    check->add_option("FILE", file)->required();

    auto* sat = app.add_subcommand("sat", "bounded satisfiability");
    sat->add_option("FILE", file)->required();
    sat->add_option("--formula", formulaName)->required();

    auto* ent = app.add_subcommand("entail", "bounded entailment check");
    ent->add_option("FILE", file)->required();
    ent->add_option("--lhs", lhsName)->required();
    ent->add_option("--rhs", rhsName)->required();

    for (auto* sub : {sat, ent}) {
        sub->add_option("--bound", bound, "total unfolding-tree nodes (default 6)");
        sub->add_option("--threads", threads)->check(CLI::Range(1u, 256u));
        sub->add_option("-o,--output", outPath, "write the witness state here");
        sub->add_option("--dot", dotPath, "write a Graphviz rendering of the witness");
    }

    auto* mc = app.add_subcommand("modelcheck", "does a state satisfy a formula");
    mc->add_option("STATE", stateFile)->required();
    mc->add_option("FILE", file)->required();
    mc->add_option("--formula", formulaName)->required();
    mc->add_flag("--mso", viaMso, "evaluate the translated MSO sentence instead");
    mc->add_option("--eval-cap", evalCap, "largest universe the MSO evaluator accepts");

    auto* emit = app.add_subcommand("emit-mso", "print the MSO sentence of a formula");
    emit->add_option("FILE", file)->required();
    emit->add_option("--formula", formulaName)->required();
    emit->add_option("-o,--output", outPath);

    auto* tw = app.add_subcommand("treewidth", "exact treewidth or decomposition validation");
    tw->add_option("STATE", stateFile)->required();
    auto* exactOpt = tw->add_flag("--exact", exact);
    tw->add_option("--validate", decompPath)->excludes(exactOpt);
    tw->add_option("--dot", dotPath, "write a Graphviz rendering of the state");

    auto* unfold = app.add_subcommand("unfold", "enumerate unfolding trees");
    unfold->add_option("FILE", file)->required();
    unfold->add_option("--pred", predName)->required();
    unfold->add_option("--max-nodes", maxNodes)->required();
    unfold->add_option("--emit-models", modelsDir);

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kPositive;
    } catch (const CLI::ParseError& e) {
        std::cerr << "slrd: " << e.what() << "\n\n";
        auto* failing = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        std::cerr << app.get_formatter()->make_help(failing, failing == &app ? "slrd" : failing->get_name(),
                                                    CLI::AppFormatMode::Normal);
        return kInputError;
    }

    try {
        if (*check) {
            auto doc = parseDocumentFile(file);
            auto report = checkWellformed(doc.system);
            std::cout << (json ? reportJson(report, doc.system) : reportText(report, doc.system));
            return report.ok() ? kPositive : kNegative;
        }
        if (*sat) {
            auto doc = parseDocumentFile(file);
            auto v = satBounded(doc.formula(formulaName), doc.system, bound, {threads});
            return reportVerdict(v, doc.system, json, {outPath, dotPath});
        }
        if (*ent) {
            auto doc = parseDocumentFile(file);
            auto v = entail(doc.formula(lhsName), doc.formula(rhsName), doc.system, bound, {threads});
            return reportVerdict(v, doc.system, json, {outPath, dotPath});
        }
        if (*mc) {
            auto state = parseStateFile(stateFile);
            auto doc = parseDocumentFile(file);
            const auto& f = doc.formula(formulaName);
            bool holds = false;
            if (viaMso) {
                std::size_t cap = evalCap ? evalCap : evalCapFromEnv();
                try {
                    holds = evalMSO(state, translateSentence(f, doc.system), {}, cap);
                } catch (const EvalCapExceeded& e) {
                    std::cerr << "slrd: " << e.what() << "\n";
                    return kUnknown;
                }
            } else {
                holds = checkTopLevel(state, f, doc.system);
            }
            if (json) {
                Json out;
                out["holds"] = holds;
                out["method"] = viaMso ? "mso" : "unfolding";
                std::cout << out.dump(2) << "\n";
            } else {
                std::cout << (holds ? "true" : "false") << "\n";
            }
            return holds ? kPositive : kNegative;
        }
        if (*emit) {
            auto doc = parseDocumentFile(file);
            auto text = emitMSO(translateSentence(doc.formula(formulaName), doc.system));
            if (outPath.empty())
                std::cout << text;
            else
                writeFile(outPath, text);
            return kPositive;
        }
        if (*tw) {
            auto state = parseStateFile(stateFile);
            if (!dotPath.empty()) writeFile(dotPath, printDot(state));
            if (!decompPath.empty()) {
                auto decomp = parseDecomposition(readFile(decompPath), state);
                auto result = validateDecomposition(state, decomp);
                if (json) {
                    Json out;
                    out["valid"] = result.ok();
                    if (result.ok()) out["width"] = *result.width;
                    else out["violation"] = result.violation;
                    std::cout << out.dump(2) << "\n";
                } else if (result.ok()) {
                    std::cout << "valid decomposition of width " << *result.width << "\n";
                } else {
                    std::cout << "invalid decomposition: " << result.violation << "\n";
                }
                return result.ok() ? kPositive : kNegative;
            }
            if (state.locations().size() > kMaxExactVertices) {
                std::cerr << "slrd: exact treewidth is limited to " << kMaxExactVertices << " locations\n";
                return kUnknown;
            }
            auto result = exactTreewidth(state);
            if (json) {
                Json out;
                out["treewidth"] = result.width;
                out["decomposition"] = Json::parse(printDecomposition(result.witness, state));
                std::cout << out.dump(2) << "\n";
            } else {
                std::cout << "treewidth " << result.width << "\n" << printDecomposition(result.witness, state);
            }
            return kPositive;
        }
        if (*unfold) {
            auto doc = parseDocumentFile(file);
            auto pred = doc.system.find(predName);
            if (!pred) throw Error("unknown predicate '" + predName + "'");
            auto trees = enumerateTrees(doc.system, *pred, maxNodes);
            if (!modelsDir.empty()) std::filesystem::create_directories(modelsDir);
            Json list = Json::array();
            for (std::size_t i = 0; i < trees.size(); ++i) {
                auto model = buildModel(trees[i], doc.system);
                const char* status = model.status == BuildStatus::Ok                 ? "ok"
                                     : model.status == BuildStatus::DoubleAllocation ? "double-allocation"
                                                                                     : "inconsistent";
                std::string path;
                if (!modelsDir.empty() && model.status == BuildStatus::Ok) {
                    path = (std::filesystem::path(modelsDir) / (predName + "_" + std::to_string(i + 1) + ".state.json"))
                               .string();
                    writeFile(path, printState(model.state));
                }
                if (json) {
                    Json entry;
                    entry["tree"] = Json::parse(treeToJson(trees[i], doc.system));
                    entry["nodes"] = trees[i].size();
                    entry["model"] = status;
                    if (!path.empty()) entry["file"] = path;
                    list.push_back(entry);
                } else {
                    std::cout << i + 1 << "\t" << trees[i].size() << "\t" << status << "\t"
                              << treeToString(trees[i], doc.system) << "\n";
                }
            }
            if (json) std::cout << list.dump(2) << "\n";
            return kPositive;
        }
    } catch (const ParseError& e) {
        std::cerr << "slrd: " << file << ": " << e.what() << "\n";
        return kInputError;
    } catch (const Error& e) {
        std::cerr << "slrd: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
