#pragma once

#include "liesym/expr.hpp"
#include "liesym/jet.hpp"
#include "liesym/vfield.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace liesym {

/// Identifiers an expression may use.
struct SymbolContext {
    std::vector<std::string> independents;
    std::vector<std::string> dependents;
    std::vector<std::string> functions;  // opaque, applied as F(args)
    std::vector<std::string> symbols;    // plain extra symbols (parameters of a flow, p, ...)
    bool allow_field_markers = false;    // accept @name summands

    JetSpace space(int n = 0) const { return JetSpace{independents, dependents, n}; }
};

Expr parse_expression(const std::string& src, const SymbolContext& ctx);

/// "x^2 @x + x*u @u" over the base coordinates of ctx.
VectorField parse_vector_field(const std::string& src, const SymbolContext& ctx);

struct EquationSpec {
    Expr lhs;
    Expr rhs;
    Expr lead;
    std::string text;

    Expr expr() const { return lhs - rhs; }
};

struct NamedField {
    std::string name;
    VectorField field;
    std::string text;
};

struct ProblemSpec {
    std::vector<std::string> independents;
    std::vector<std::string> dependents;
    std::vector<std::string> functions;
    std::vector<EquationSpec> equations;
    std::vector<NamedField> fields;
    std::optional<std::string> profile;
    std::optional<int> degree;
    std::optional<int> order;
    std::optional<std::uint64_t> seed;
    std::vector<Expr> extra_basis;
    std::map<std::string, std::string> options;  // everything else, verbatim

    SymbolContext context() const;
    JetSpace space(int n = 0) const { return JetSpace{independents, dependents, n}; }
    const NamedField* field(const std::string& name) const;
};

ProblemSpec parse_problem(const std::string& src);

} // namespace liesym
