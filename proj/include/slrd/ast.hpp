#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace slrd {

/// Raised for malformed input and violated operation preconditions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Position in a tree: the empty sequence is the root, p.i is the i-th child.
using TreePosition = std::vector<int>;

std::string positionToString(const TreePosition& pos);  // "e" for the root, "0.1" otherwise

enum class VarKind { Program, Logical };

/// A program (pointer) variable or a logical variable, optionally tree-indexed.
/// Identity is the (name, kind, index) triple, so x and x^p never collide.
struct Variable {
    std::string name;
    VarKind kind = VarKind::Logical;
    std::optional<TreePosition> index;

    static Variable nil() { return {"nil", VarKind::Program, std::nullopt}; }
    static Variable program(std::string n) { return {std::move(n), VarKind::Program, std::nullopt}; }
    static Variable logical(std::string n) { return {std::move(n), VarKind::Logical, std::nullopt}; }

    bool isNil() const { return kind == VarKind::Program && name == "nil"; }

    /// x^p; nil is global and is returned unchanged.
    Variable indexed(const TreePosition& pos) const;

    auto operator<=>(const Variable&) const = default;
    bool operator==(const Variable&) const = default;
};

std::string toString(const Variable& v);

using VarPair = std::pair<Variable, Variable>;

/// Conjunction of equalities and disequalities. Pairs are unordered: they are
/// stored with first <= second, except in closures, which hold both orders.
struct PureFormula {
    std::set<VarPair> equalities;
    std::set<VarPair> disequalities;

    void addEquality(const Variable& a, const Variable& b);
    void addDisequality(const Variable& a, const Variable& b);
    bool hasEquality(const Variable& a, const Variable& b) const;
    bool hasDisequality(const Variable& a, const Variable& b) const;
    bool empty() const { return equalities.empty() && disequalities.empty(); }
    std::set<Variable> variables() const;

    bool operator==(const PureFormula&) const = default;
};

struct PointsTo {
    Variable source;
    std::vector<Variable> targets;

    bool operator==(const PointsTo&) const = default;
};

/// Separating conjunction of points-to atoms; no atoms means emp.
struct SpatialFormula {
    std::vector<PointsTo> atoms;

    bool isEmp() const { return atoms.empty(); }
    bool operator==(const SpatialFormula&) const = default;
};

/// Existentially quantified symbolic heap: exists bound . spatial & pure.
struct BasicFormula {
    std::vector<Variable> bound;
    SpatialFormula spatial;
    PureFormula pure;

    bool operator==(const BasicFormula&) const = default;
};

struct PredicateOccurrence {
    std::size_t predicate = 0;
    std::vector<Variable> args;

    bool operator==(const PredicateOccurrence&) const = default;
};

struct Rule {
    std::vector<Variable> parameters;
    std::vector<Variable> bound;
    SpatialFormula head;
    std::vector<PredicateOccurrence> tail;
    PureFormula pure;

    std::size_t varCount() const { return parameters.size() + bound.size(); }
    bool isBaseCase() const { return tail.empty(); }
    /// Parameters then bound variables, in declaration order.
    std::vector<Variable> variables() const;
    bool operator==(const Rule&) const = default;
};

struct Predicate {
    std::string name;
    std::vector<Variable> parameters;
    std::vector<Rule> rules;

    std::size_t arity() const { return parameters.size(); }
    bool operator==(const Predicate&) const = default;
};

/// A system of recursive definitions over selectors 1..selectorCount.
class RecursiveSystem {
public:
    RecursiveSystem() = default;
    /// Validates: nonempty rule lists, shared parameter names per predicate,
    /// tail arities, parameters disjoint from bound variables, no allocation of
    /// nil, rule variables closed, and selectorCount >= every points-to arity.
    RecursiveSystem(std::vector<Predicate> predicates, int selectorCount);

    const std::vector<Predicate>& predicates() const { return predicates_; }
    const Predicate& predicate(std::size_t i) const { return predicates_.at(i); }
    const Rule& rule(std::size_t pred, std::size_t rule) const { return predicates_.at(pred).rules.at(rule); }
    int selectorCount() const { return selectorCount_; }
    std::optional<std::size_t> find(const std::string& name) const;

    /// Largest tail length over all rules (N, so D(P) = {-1, 0, .., N-1}).
    std::size_t maxTail() const;
    std::vector<int> directions() const;
    /// |P|^var.
    std::size_t varCount() const;
    std::size_t ruleCount() const;

    bool operator==(const RecursiveSystem&) const = default;

private:
    std::vector<Predicate> predicates_;
    int selectorCount_ = 1;
};

/// exists bound . basic * P_1(..) * .. * P_n(..)
struct TopLevelFormula {
    std::vector<Variable> bound;
    BasicFormula basic;
    std::vector<PredicateOccurrence> occurrences;

    bool operator==(const TopLevelFormula&) const = default;
};

/// Equality closure: reflexive over vars, symmetric, transitive; disequalities
/// are symmetrized and propagated across equality classes.
PureFormula pureClosure(const PureFormula& pure, const std::set<Variable>& vars);

/// ||Sigma||: total number of variable occurrences.
std::size_t sigmaSize(const SpatialFormula& spatial);

struct VarClassification {
    std::set<Variable> allocated;
    std::set<Variable> referenced;
    std::set<Variable> free;
};

VarClassification classifyVars(const BasicFormula& formula);

/// All variables occurring in the formula (bound ones included).
std::set<Variable> variablesOf(const BasicFormula& formula);
std::set<Variable> variablesOf(const TopLevelFormula& formula);

/// Union-find over a dense index space.
class UnionFind {
public:
    explicit UnionFind(std::size_t n = 0);
    std::size_t add();
    std::size_t find(std::size_t x);
    bool unite(std::size_t a, std::size_t b);
    std::size_t size() const { return parent_.size(); }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_;
};

}  // namespace slrd
