#pragma once

#include "liesym/expr.hpp"
#include "liesym/ratfun.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace liesym {

using Vector = std::vector<Scalar>;
using SparseRow = std::map<std::size_t, Scalar>;

struct SparseMatrix {
    std::size_t cols = 0;
    std::vector<SparseRow> rows;

    SparseMatrix() = default;
    explicit SparseMatrix(std::size_t c) : cols(c) {}
    static SparseMatrix from_dense(const std::vector<Vector>& rows, std::size_t cols);
    void add_row(SparseRow r);
};

/// Reduced row echelon form; pivots[i] is the pivot column of rows[i], entry 1.
struct Echelon {
    std::size_t cols = 0;
    std::vector<SparseRow> rows;
    std::vector<std::size_t> pivots;

    std::size_t rank() const { return rows.size(); }
};

/// Fraction-free elimination on integer-scaled rows, then reduction.
Echelon rref(const SparseMatrix& m);

/// Basis of {x : Mx = 0}, one vector per free column in increasing order.
std::vector<Vector> nullspace(const SparseMatrix& m);
std::vector<Vector> nullspace(const std::vector<Vector>& rows, std::size_t cols);

std::size_t rank(const SparseMatrix& m);
std::size_t rank(const std::vector<Vector>& rows, std::size_t cols);

/// Rank of a matrix of normal forms evaluated at a rational point (by symbol name).
std::size_t rank_at_point(const std::vector<std::vector<RatFun>>& rows, const std::map<std::string, Scalar>& point);
std::size_t rank_at_point(const std::vector<std::vector<Expr>>& rows, const std::map<std::string, Scalar>& point);

/// Coordinates of v in an independent basis; nullopt when v is outside the span.
/// Throws DependentBasis.
std::optional<Vector> span_coordinates(const Vector& v, const std::vector<Vector>& basis);

/// Reduced echelon basis of the span of the given vectors.
std::vector<Vector> span_basis(const std::vector<Vector>& vectors, std::size_t dim);

} // namespace liesym
