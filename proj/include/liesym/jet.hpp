#pragma once

#include "liesym/expr.hpp"
#include "liesym/ratfun.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace liesym {

/// J^n over ordered independent variables x_1..x_p and dependents u_1..u_q.
struct JetSpace {
    std::vector<std::string> independents;
    std::vector<std::string> dependents;
    int n = 0;

    int p() const { return static_cast<int>(independents.size()); }
    int q() const { return static_cast<int>(dependents.size()); }
    Expr x(int i) const;
    Expr u(int alpha) const;
    Expr var(int alpha, const std::vector<int>& counts) const;
    /// Multi-indices of exactly the given order, graded-lex (first variable highest).
    std::vector<std::vector<int>> multi_indices(int order) const;
    /// x's, then u's, then derivatives by increasing order.
    std::vector<Expr> coordinates() const;
    long dimension() const;
    JetSpace with_order(int order) const;
};

long binomial(long n, long k);
long jet_dimension(int p, int q, int n);

/// Dependent index and counts of a jet coordinate belonging to this space.
struct JetCoord {
    int alpha = 0;
    std::vector<int> counts;
    int order() const;
};
std::optional<JetCoord> jet_coord(const SymbolInfo& s, const JetSpace& space);
std::optional<int> independent_index(const SymbolInfo& s, const JetSpace& space);

/// Total derivative D_i; jet coordinates beyond n are created as needed.
Expr total_derivative(const Expr& e, int i, const JetSpace& space);
RatFun total_derivative(const RatFun& e, int i, const JetSpace& space);
/// D_J for a multi-index given as counts.
RatFun total_derivative(const RatFun& e, const std::vector<int>& counts, const JetSpace& space);

int differential_order(const Expr& e);
int differential_order(const RatFun& r);

/// Rational values k/d, 1 <= k <= 97, d in {1,2,3}, for every coordinate of J^n.
std::map<std::string, Scalar> generic_point(const JetSpace& space, std::uint64_t seed);

} // namespace liesym
