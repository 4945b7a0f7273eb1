#include "slrd/mso.hpp"

#include <cctype>

#include "slrd/parser.hpp"

namespace slrd {

namespace mso {

namespace {

Mso make(MsoKind kind, std::string x = {}, std::string y = {}, int selector = 0, std::vector<Mso> kids = {}) {
    return std::make_shared<const MsoNode>(MsoNode{kind, std::move(x), std::move(y), selector, std::move(kids)});
}

}  // namespace

Mso eq(std::string x, std::string y) { return make(MsoKind::Eq, std::move(x), std::move(y)); }
Mso var(std::string programVar, std::string x) { return make(MsoKind::Var, std::move(programVar), std::move(x)); }
Mso edge(int selector, std::string x, std::string y) {
    if (selector < 1) throw Error("selectors start at 1");
    return make(MsoKind::Edge, std::move(x), std::move(y), selector);
}
Mso null(std::string x) { return make(MsoKind::Null, std::move(x)); }
Mso in(std::string x, std::string set) { return make(MsoKind::In, std::move(x), std::move(set)); }

Mso conj(std::vector<Mso> kids) {
    if (kids.size() == 1) return kids.front();
    return make(MsoKind::And, {}, {}, 0, std::move(kids));
}

Mso disj(std::vector<Mso> kids) {
    if (kids.size() == 1) return kids.front();
    return make(MsoKind::Or, {}, {}, 0, std::move(kids));
}

Mso neg(Mso f) { return make(MsoKind::Not, {}, {}, 0, {std::move(f)}); }
Mso implies(Mso a, Mso b) { return disj({neg(std::move(a)), std::move(b)}); }
Mso iff(Mso a, Mso b) { return conj({implies(a, b), implies(b, a)}); }
Mso exists1(std::string x, Mso body) { return make(MsoKind::Exists1, std::move(x), {}, 0, {std::move(body)}); }
Mso exists2(std::string x, Mso body) { return make(MsoKind::Exists2, std::move(x), {}, 0, {std::move(body)}); }
Mso forall1(std::string x, Mso body) { return make(MsoKind::Forall1, std::move(x), {}, 0, {std::move(body)}); }
Mso forall2(std::string x, Mso body) { return make(MsoKind::Forall2, std::move(x), {}, 0, {std::move(body)}); }
Mso truth() { return make(MsoKind::And); }
Mso falsity() { return make(MsoKind::Or); }

Mso subset(const std::string& sub, const std::string& super, const std::string& bound) {
    return forall1(bound, disj({neg(in(bound, sub)), in(bound, super)}));
}

}  // namespace mso

bool msoEqual(const Mso& a, const Mso& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->x != b->x || a->y != b->y || a->selector != b->selector ||
        a->kids.size() != b->kids.size())
        return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!msoEqual(a->kids[i], b->kids[i])) return false;
    return true;
}

std::size_t msoSize(const Mso& f) {
    std::size_t n = 1;
    for (const auto& k : f->kids) n += msoSize(k);
    return n;
}

namespace {

const char* keyword(MsoKind k) {
    switch (k) {
        case MsoKind::Eq: return "=";
        case MsoKind::Var: return "var";
        case MsoKind::Edge: return "edge";
        case MsoKind::Null: return "null";
        case MsoKind::In: return "in";
        case MsoKind::And: return "and";
        case MsoKind::Or: return "or";
        case MsoKind::Not: return "not";
        case MsoKind::Exists1: return "exists1";
        case MsoKind::Exists2: return "exists2";
        case MsoKind::Forall1: return "forall1";
        case MsoKind::Forall2: return "forall2";
    }
    return "?";
}

bool isAtom(const MsoNode& n) { return n.kids.empty() && n.kind != MsoKind::And && n.kind != MsoKind::Or; }

std::size_t inlineLength(const MsoNode& n, std::size_t cap) {
    std::size_t len = 0;
    switch (n.kind) {
        case MsoKind::Eq:
        case MsoKind::Var:
        case MsoKind::In:
        case MsoKind::Edge:
            return std::string(keyword(n.kind)).size() + n.x.size() + n.y.size() + 4 +
                   (n.kind == MsoKind::Edge ? std::to_string(n.selector).size() + 1 : 0);
        case MsoKind::Null:
            return n.x.size() + 7;
        default:
            len = std::string(keyword(n.kind)).size() + 2 + (n.x.empty() ? 0 : n.x.size() + 1);
    }
    for (const auto& k : n.kids) {
        if (len > cap) return len;
        len += 1 + inlineLength(*k, cap - std::min(cap, len));
    }
    return len;
}

bool fitsLine(const MsoNode& n, std::size_t budget) { return inlineLength(n, budget) <= budget; }

void emit(const MsoNode& n, std::size_t indent, std::string& out) {
    switch (n.kind) {
        case MsoKind::Eq:
        case MsoKind::Var:
        case MsoKind::In:
            out += std::string("(") + keyword(n.kind) + " " + n.x + " " + n.y + ")";
            return;
        case MsoKind::Edge:
            out += "(edge " + std::to_string(n.selector) + " " + n.x + " " + n.y + ")";
            return;
        case MsoKind::Null:
            out += "(null " + n.x + ")";
            return;
        default:
            break;
    }
    out += std::string("(") + keyword(n.kind);
    bool quant = n.kind == MsoKind::Exists1 || n.kind == MsoKind::Exists2 || n.kind == MsoKind::Forall1 ||
                 n.kind == MsoKind::Forall2;
    if (quant) out += " " + n.x;
    bool flat = n.kids.empty() || (n.kind == MsoKind::Not && isAtom(*n.kids.front())) || fitsLine(n, 72);
    for (const auto& k : n.kids) {
        if (flat) {
            out += " ";
        } else {
            out += "\n";
            out.append(indent + 2, ' ');
        }
        emit(*k, indent + 2, out);
    }
    out += ")";
}

class SexprParser {
public:
    explicit SexprParser(std::string_view text) : text_(text) {}

    Mso document() {
        auto f = formula();
        skip();
        if (pos_ < text_.size()) fail("trailing input after formula");
        return f;
    }

private:
    Mso formula() {
        expect('(');
        auto head = word();
        Mso out;
        if (head == "=") {
            auto x = word();
            out = mso::eq(x, word());
        } else if (head == "var") {
            auto u = word();
            out = mso::var(u, word());
        } else if (head == "edge") {
            auto k = word();
            int sel = 0;
            try {
                std::size_t used = 0;
                sel = std::stoi(k, &used);
                if (used != k.size() || sel < 1) throw Error("");
            } catch (...) {
                fail("edge selector must be a positive number");
            }
            auto x = word();
            out = mso::edge(sel, x, word());
        } else if (head == "null") {
            out = mso::null(word());
        } else if (head == "in") {
            auto x = word();
            out = mso::in(x, word());
        } else if (head == "and" || head == "or") {
            std::vector<Mso> kids;
            while (peek() != ')') kids.push_back(formula());
            auto kind = head == "and" ? MsoKind::And : MsoKind::Or;
            out = std::make_shared<const MsoNode>(MsoNode{kind, {}, {}, 0, std::move(kids)});
        } else if (head == "not") {
            out = mso::neg(formula());
        } else if (head == "exists1" || head == "exists2" || head == "forall1" || head == "forall2") {
            auto x = word();
            auto body = formula();
            if (head == "exists1") out = mso::exists1(x, body);
            if (head == "exists2") out = mso::exists2(x, body);
            if (head == "forall1") out = mso::forall1(x, body);
            if (head == "forall2") out = mso::forall2(x, body);
        } else {
            fail("unknown connective '" + head + "'");
        }
        expect(')');
        return out;
    }

    void skip() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    char peek() {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        return text_[pos_];
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }

    std::string word() {
        char c = peek();
        if (c == '(' || c == ')') fail("expected a name");
        std::string out;
        while (pos_ < text_.size()) {
            c = text_[pos_];
            if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c))) break;
            out += c;
            advance();
        }
        return out;
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(line_, col_, msg); }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::string emitMSO(const Mso& f) {
    std::string out;
    emit(*f, 0, out);
    return out + "\n";
}

Mso parseMSO(std::string_view text) { return SexprParser(text).document(); }

}  // namespace slrd
