#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "slrd/state.hpp"

namespace slrd {

enum class MsoKind { Eq, Var, Edge, Null, In, And, Or, Not, Exists1, Exists2, Forall1, Forall2 };

struct MsoNode;
using Mso = std::shared_ptr<const MsoNode>;

/// Atoms: Eq(x, y), Var(u: program variable, x), Edge(sel, x, y), Null(x), In(x, X).
/// Quantifiers bind `x`; (and) is true and (or) is false.
struct MsoNode {
    MsoKind kind;
    std::string x;
    std::string y;
    int selector = 0;
    std::vector<Mso> kids;
};

namespace mso {

Mso eq(std::string x, std::string y);
Mso var(std::string programVar, std::string x);
Mso edge(int selector, std::string x, std::string y);
Mso null(std::string x);
Mso in(std::string x, std::string set);
Mso conj(std::vector<Mso> kids);
Mso disj(std::vector<Mso> kids);
Mso neg(Mso f);
Mso implies(Mso a, Mso b);
Mso iff(Mso a, Mso b);
Mso exists1(std::string x, Mso body);
Mso exists2(std::string x, Mso body);
Mso forall1(std::string x, Mso body);
Mso forall2(std::string x, Mso body);
Mso truth();
Mso falsity();
/// sub <= super as sets.
Mso subset(const std::string& sub, const std::string& super, const std::string& bound);

}  // namespace mso

bool msoEqual(const Mso& a, const Mso& b);
std::size_t msoSize(const Mso& f);

/// s-expression text, one compound per line with two-space indentation.
std::string emitMSO(const Mso& f);
Mso parseMSO(std::string_view text);

struct SOInterpretation {
    std::map<std::string, Location> first;
    std::map<std::string, std::set<Location>> second;
};

inline constexpr std::size_t kDefaultEvalCap = 8;

class EvalCapExceeded : public Error {
public:
    using Error::Error;
};

/// Exact evaluation over the universe loc(S) u {null} u the interpretation's
/// locations. Throws Error when that universe exceeds `cap` or a free variable
/// is uninterpreted.
bool evalMSO(const State& state, const Mso& formula, const SOInterpretation& interp = {},
             std::size_t cap = kDefaultEvalCap);

}  // namespace slrd
