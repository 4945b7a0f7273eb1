#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "slrd/ast.hpp"

namespace slrd {

class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& what);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

struct NamedFormula {
    std::string name;
    TopLevelFormula formula;

    bool operator==(const NamedFormula&) const = default;
};

/// A parsed `.slrd` document: program variables, predicates, named formulas.
struct Document {
    std::vector<std::string> programVars;
    RecursiveSystem system;
    std::vector<NamedFormula> formulas;

    const TopLevelFormula& formula(const std::string& name) const;
    bool operator==(const Document&) const = default;
};

Document parseDocument(std::string_view text);
Document parseDocumentFile(const std::string& path);

std::string printDocument(const Document& doc);
std::string printFormula(const SpatialFormula& spatial);
std::string printFormula(const PureFormula& pure);
std::string printFormula(const BasicFormula& formula);
std::string printFormula(const TopLevelFormula& formula, const RecursiveSystem& system);
std::string printRule(const Rule& rule, const RecursiveSystem& system);

std::string readFile(const std::string& path);

}  // namespace slrd
