#include "slrd/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace slrd {

ParseError::ParseError(int line, int column, const std::string& what)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

const TopLevelFormula& Document::formula(const std::string& name) const {
    for (const auto& f : formulas)
        if (f.name == name) return f.formula;
    throw Error("no formula named '" + name + "'");
}

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Document parseDocumentFile(const std::string& path) { return parseDocument(readFile(path)); }

namespace {

enum class Tok { Ident, Symbol, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skipBlank();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (pos_ < src_.size() && isIdentChar(src_[pos_])) t.text += take();
                if (pos_ < src_.size() && src_[pos_] == '^') {
                    t.text += take();
                    if (pos_ < src_.size() && src_[pos_] == 'e') {
                        t.text += take();
                    } else {
                        if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                            throw ParseError(line_, col_, "malformed tree index");
                        while (pos_ < src_.size() &&
                               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                            t.text += take();
                        if (t.text.back() == '_') throw ParseError(line_, col_, "malformed tree index");
                    }
                }
            } else {
                t.kind = Tok::Symbol;
                std::string two(src_.substr(pos_, 2));
                if (two == ":=" || two == "->" || two == "!=") {
                    t.text = two;
                    take();
                    take();
                } else if (std::string("|*&=.,();").find(c) != std::string::npos) {
                    t.text = std::string(1, take());
                } else {
                    throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
                }
            }
            out.push_back(t);
        }
    }

private:
    static bool isIdentChar(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
    }

    char take() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skipBlank() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') take();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct RawVar {
    std::string text;
    int line = 0;
    int column = 0;
};

struct RawCall {
    RawVar name;
    std::vector<RawVar> args;
};

struct RawPointsTo {
    RawVar source;
    std::vector<RawVar> targets;
};

struct RawPure {
    RawVar lhs;
    RawVar rhs;
    bool equal = true;
};

struct RawBody {
    std::vector<RawVar> bound;
    std::vector<RawPointsTo> pointsTo;
    std::vector<RawCall> calls;
    std::vector<RawPure> pure;
};

struct RawPred {
    RawVar name;
    std::vector<RawVar> params;
    std::vector<RawBody> bodies;
};

struct RawFormula {
    RawVar name;
    RawBody body;
};

const std::set<std::string> kKeywords = {"pred", "formula", "vars", "exists", "emp"};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    void run() {
        while (peek().kind != Tok::End) {
            const Token& t = peek();
            if (isWord("vars")) {
                next();
                do {
                    programVars_.push_back(identifier());
                } while (accept(","));
                expect(";");
            } else if (isWord("pred")) {
                next();
                RawPred p;
                p.name = identifier();
                expect("(");
                if (!isSym(")")) {
                    do {
                        p.params.push_back(identifier());
                    } while (accept(","));
                }
                expect(")");
                expect(":=");
                do {
                    p.bodies.push_back(body());
                } while (accept("|"));
                expect(";");
                preds_.push_back(std::move(p));
            } else if (isWord("formula")) {
                next();
                RawFormula f;
                f.name = identifier();
                expect(":=");
                f.body = body();
                expect(";");
                formulas_.push_back(std::move(f));
            } else {
                throw ParseError(t.line, t.column, "expected 'pred', 'formula' or 'vars', found '" + t.text + "'");
            }
        }
    }

    std::vector<RawVar> programVars_;
    std::vector<RawPred> preds_;
    std::vector<RawFormula> formulas_;

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& peekAt(std::size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool isSym(const char* s) const { return peek().kind == Tok::Symbol && peek().text == s; }
    bool isWord(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }

    bool accept(const char* s) {
        if (!isSym(s)) return false;
        next();
        return true;
    }

    void expect(const char* s) {
        if (!accept(s)) fail(std::string("expected '") + s + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.line, t.column, msg + ", found " + found);
    }

    RawVar identifier() {
        const Token& t = peek();
        if (t.kind != Tok::Ident || kKeywords.count(t.text)) fail("expected identifier");
        next();
        return {t.text, t.line, t.column};
    }

    RawBody body() {
        RawBody b;
        if (isWord("exists")) {
            next();
            do {
                b.bound.push_back(identifier());
            } while (accept(","));
            expect(".");
        }
        do {
            spatialAtom(b);
        } while (accept("*"));
        while (accept("&")) {
            RawPure p;
            p.lhs = identifier();
            if (accept("=")) {
                p.equal = true;
            } else if (accept("!=")) {
                p.equal = false;
            } else {
                fail("expected '=' or '!='");
            }
            p.rhs = identifier();
            b.pure.push_back(p);
        }
        return b;
    }

    void spatialAtom(RawBody& b) {
        if (isWord("emp")) {
            next();
            return;
        }
        RawVar head = identifier();
        if (accept("->")) {
            RawPointsTo pt;
            pt.source = head;
            if (accept("(")) {
                do {
                    pt.targets.push_back(identifier());
                } while (accept(","));
                expect(")");
            } else {
                pt.targets.push_back(identifier());
            }
            b.pointsTo.push_back(std::move(pt));
        } else if (accept("(")) {
            RawCall call;
            call.name = head;
            if (!isSym(")")) {
                do {
                    call.args.push_back(identifier());
                } while (accept(","));
            }
            expect(")");
            b.calls.push_back(std::move(call));
        } else {
            fail("expected '->' or '('");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

/// Splits `name^0_1` into its name and tree index.
std::pair<std::string, std::optional<TreePosition>> splitIndexed(const std::string& text) {
    auto caret = text.find('^');
    if (caret == std::string::npos) return {text, std::nullopt};
    std::string name = text.substr(0, caret);
    std::string idx = text.substr(caret + 1);
    TreePosition pos;
    if (idx != "e") {
        std::stringstream ss(idx);
        std::string part;
        while (std::getline(ss, part, '_')) pos.push_back(std::stoi(part));
    }
    return {name, pos};
}

class Resolver {
public:
    Resolver(const Parser& p) : p_(p) {}

    Document run() {
        Document doc;
        std::set<std::string> pvars;
        for (const auto& v : p_.programVars_) {
            if (v.text == "nil") throw ParseError(v.line, v.column, "nil is implicitly declared");
            if (v.text.find('^') != std::string::npos)
                throw ParseError(v.line, v.column, "program variables cannot be tree-indexed");
            if (!pvars.insert(v.text).second)
                throw ParseError(v.line, v.column, "duplicate program variable '" + v.text + "'");
            doc.programVars.push_back(v.text);
        }
        programVars_ = pvars;

        for (std::size_t i = 0; i < p_.preds_.size(); ++i) {
            const auto& rp = p_.preds_[i];
            if (predIndex_.count(rp.name.text))
                throw ParseError(rp.name.line, rp.name.column, "duplicate predicate '" + rp.name.text + "'");
            predIndex_[rp.name.text] = i;
            arity_.push_back(rp.params.size());
        }

        std::vector<Predicate> preds;
        for (const auto& rp : p_.preds_) {
            Predicate pred;
            pred.name = rp.name.text;
            std::set<std::string> paramNames;
            for (const auto& v : rp.params) {
                if (v.text == "nil") throw ParseError(v.line, v.column, "nil cannot be a parameter");
                if (!paramNames.insert(v.text).second)
                    throw ParseError(v.line, v.column, "duplicate parameter '" + v.text + "'");
                pred.parameters.push_back(Variable::logical(v.text));
            }
            for (const auto& body : rp.bodies) pred.rules.push_back(rule(pred, body));
            preds.push_back(std::move(pred));
        }

        for (const auto& rf : p_.formulas_) {
            for (const auto& f : doc.formulas)
                if (f.name == rf.name.text)
                    throw ParseError(rf.name.line, rf.name.column, "duplicate formula '" + rf.name.text + "'");
            doc.formulas.push_back({rf.name.text, formula(rf.body)});
        }

        try {
            doc.system = RecursiveSystem(std::move(preds), std::max(maxArity_, 1));
        } catch (const Error& e) {
            throw ParseError(1, 1, e.what());
        }
        return doc;
    }

private:
    Rule rule(const Predicate& pred, const RawBody& body) {
        Rule r;
        r.parameters = pred.parameters;
        std::set<std::string> scope;
        for (const auto& p : pred.parameters) scope.insert(p.name);
        for (const auto& z : body.bound) {
            if (z.text == "nil") throw ParseError(z.line, z.column, "nil cannot be quantified");
            if (!scope.insert(z.text).second)
                throw ParseError(z.line, z.column, "variable '" + z.text + "' is already bound");
            r.bound.push_back(Variable::logical(z.text));
        }
        auto var = [&](const RawVar& v) {
            if (v.text == "nil") return Variable::nil();
            if (!scope.count(v.text))
                throw ParseError(v.line, v.column, "variable '" + v.text + "' is not a parameter or bound variable");
            return Variable::logical(v.text);
        };
        r.head = spatial(body, var);
        for (const auto& c : body.calls) {
            auto occ = call(c, var);
            for (std::size_t k = 0; k < occ.args.size(); ++k)
                if (occ.args[k].isNil())
                    throw ParseError(c.args[k].line, c.args[k].column, "nil cannot be passed inside a rule");
            r.tail.push_back(std::move(occ));
        }
        r.pure = pure(body, var);
        return r;
    }

    TopLevelFormula formula(const RawBody& body) {
        TopLevelFormula f;
        std::set<std::string> bound;
        for (const auto& z : body.bound) {
            if (z.text == "nil") throw ParseError(z.line, z.column, "nil cannot be quantified");
            if (!bound.insert(z.text).second)
                throw ParseError(z.line, z.column, "variable '" + z.text + "' is already bound");
            f.bound.push_back(varOf(z.text, bound));
        }
        auto var = [&](const RawVar& v) { return varOf(v.text, bound); };
        f.basic.spatial = spatial(body, var);
        for (const auto& c : body.calls) f.occurrences.push_back(call(c, var));
        f.basic.pure = pure(body, var);
        return f;
    }

    Variable varOf(const std::string& text, const std::set<std::string>& bound) const {
        if (text == "nil") return Variable::nil();
        auto [name, idx] = splitIndexed(text);
        if (idx) return {name, VarKind::Logical, idx};
        if (bound.count(text)) return Variable::logical(text);
        if (programVars_.count(text)) return Variable::program(text);
        return Variable::logical(text);
    }

    template <class VarFn>
    SpatialFormula spatial(const RawBody& body, VarFn&& var) {
        SpatialFormula s;
        for (const auto& pt : body.pointsTo) {
            if (pt.source.text == "nil")
                throw ParseError(pt.source.line, pt.source.column, "nil cannot be allocated");
            PointsTo atom;
            atom.source = var(pt.source);
            for (const auto& t : pt.targets) atom.targets.push_back(var(t));
            maxArity_ = std::max(maxArity_, static_cast<int>(atom.targets.size()));
            s.atoms.push_back(std::move(atom));
        }
        return s;
    }

    template <class VarFn>
    PredicateOccurrence call(const RawCall& c, VarFn&& var) {
        auto it = predIndex_.find(c.name.text);
        if (it == predIndex_.end())
            throw ParseError(c.name.line, c.name.column, "undefined predicate '" + c.name.text + "'");
        if (c.args.size() != arity_[it->second])
            throw ParseError(c.name.line, c.name.column,
                             "arity mismatch: '" + c.name.text + "' expects " + std::to_string(arity_[it->second]) +
                                 " arguments, got " + std::to_string(c.args.size()));
        PredicateOccurrence occ;
        occ.predicate = it->second;
        for (const auto& a : c.args) occ.args.push_back(var(a));
        return occ;
    }

    template <class VarFn>
    PureFormula pure(const RawBody& body, VarFn&& var) {
        PureFormula p;
        for (const auto& atom : body.pure) {
            if (atom.equal)
                p.addEquality(var(atom.lhs), var(atom.rhs));
            else
                p.addDisequality(var(atom.lhs), var(atom.rhs));
        }
        return p;
    }

    const Parser& p_;
    std::set<std::string> programVars_;
    std::map<std::string, std::size_t> predIndex_;
    std::vector<std::size_t> arity_;
    int maxArity_ = 0;
};

std::string joinVars(const std::vector<Variable>& vars) {
    std::string out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) out += ", ";
        out += toString(vars[i]);
    }
    return out;
}

std::string printAtom(const PointsTo& atom) { return toString(atom.source) + " -> (" + joinVars(atom.targets) + ")"; }

std::string printCall(const PredicateOccurrence& occ, const RecursiveSystem& system) {
    return system.predicate(occ.predicate).name + "(" + joinVars(occ.args) + ")";
}

std::string printBody(const std::vector<Variable>& bound, const SpatialFormula& spatial,
                      const std::vector<PredicateOccurrence>& calls, const PureFormula& pure,
                      const RecursiveSystem* system) {
    std::string out;
    if (!bound.empty()) out += "exists " + joinVars(bound) + " . ";
    std::vector<std::string> parts;
    for (const auto& atom : spatial.atoms) parts.push_back(printAtom(atom));
    for (const auto& occ : calls) parts.push_back(printCall(occ, *system));
    if (parts.empty()) parts.push_back("emp");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " * ";
        out += parts[i];
    }
    if (!pure.empty()) out += " & " + printFormula(pure);
    return out;
}

}  // namespace

Document parseDocument(std::string_view text) {
    Parser parser(Lexer(text).run());
    parser.run();
    return Resolver(parser).run();
}

std::string printFormula(const SpatialFormula& spatial) {
    if (spatial.isEmp()) return "emp";
    std::string out;
    for (std::size_t i = 0; i < spatial.atoms.size(); ++i) {
        if (i) out += " * ";
        out += printAtom(spatial.atoms[i]);
    }
    return out;
}

std::string printFormula(const PureFormula& pure) {
    std::vector<std::string> parts;
    for (const auto& [a, b] : pure.equalities) parts.push_back(toString(a) + " = " + toString(b));
    for (const auto& [a, b] : pure.disequalities) parts.push_back(toString(a) + " != " + toString(b));
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " & ";
        out += parts[i];
    }
    return out;
}

std::string printFormula(const BasicFormula& formula) {
    return printBody(formula.bound, formula.spatial, {}, formula.pure, nullptr);
}

std::string printFormula(const TopLevelFormula& formula, const RecursiveSystem& system) {
    std::vector<Variable> bound = formula.bound;
    bound.insert(bound.end(), formula.basic.bound.begin(), formula.basic.bound.end());
    return printBody(bound, formula.basic.spatial, formula.occurrences, formula.basic.pure, &system);
}

std::string printRule(const Rule& rule, const RecursiveSystem& system) {
    return printBody(rule.bound, rule.head, rule.tail, rule.pure, &system);
}

std::string printDocument(const Document& doc) {
    std::string out;
    if (!doc.programVars.empty()) {
        out += "vars ";
        for (std::size_t i = 0; i < doc.programVars.size(); ++i) {
            if (i) out += ", ";
            out += doc.programVars[i];
        }
        out += ";\n\n";
    }
    for (const auto& pred : doc.system.predicates()) {
        out += "pred " + pred.name + "(" + joinVars(pred.parameters) + ") :=\n";
        for (std::size_t i = 0; i < pred.rules.size(); ++i) {
            out += i == 0 ? "    " : "  | ";
            out += printRule(pred.rules[i], doc.system) + "\n";
        }
        out += "  ;\n\n";
    }
    for (const auto& f : doc.formulas) out += "formula " + f.name + " := " + printFormula(f.formula, doc.system) + ";\n";
    return out;
}

}  // namespace slrd
