#include "liesym/linsolve.hpp"

#include "liesym/errors.hpp"
#include "liesym/expr_ops.hpp"

#include <algorithm>

namespace liesym {

namespace {

using IntRow = std::map<std::size_t, Integer>;

// Scale to integers and divide out the content; leading entry made positive.
IntRow primitive(const SparseRow& r) {
    Integer l = 1;
    for (const auto& [c, v] : r) {
        if (v == 0) continue;
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
    }
    IntRow out;
    for (const auto& [c, v] : r) {
        if (v == 0) continue;
        out[c] = v.get_num() * (l / v.get_den());
    }
    return out;
}

void make_primitive(IntRow& r) {
    Integer g = 0;
    for (const auto& [c, v] : r) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        if (g == 1) break;
    }
    if (g == 0) return;
    if (r.begin()->second < 0) g = -g;
    if (g == 1) return;
    for (auto& [c, v] : r) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
}

// target := a*target - b*src with a, b the column entries, removing content.
void eliminate(IntRow& target, const IntRow& src, std::size_t col) {
    auto it = target.find(col);
    if (it == target.end()) return;
    Integer a = src.at(col), b = it->second;
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    a /= g;
    b /= g;
    if (a != 1)
        for (auto& [c, v] : target) v *= a;
    for (const auto& [c, v] : src) {
        Integer& t = target[c];
        t -= b * v;
    }
    for (auto i = target.begin(); i != target.end();) {
        if (i->second == 0)
            i = target.erase(i);
        else
            ++i;
    }
    make_primitive(target);
}

} // namespace

SparseMatrix SparseMatrix::from_dense(const std::vector<Vector>& rows, std::size_t cols) {
    SparseMatrix m(cols);
    for (const auto& r : rows) {
        SparseRow s;
        for (std::size_t j = 0; j < r.size(); ++j)
            if (r[j] != 0) s[j] = r[j];
        m.add_row(std::move(s));
    }
    return m;
}

void SparseMatrix::add_row(SparseRow r) {
    for (auto i = r.begin(); i != r.end();) {
        if (i->second == 0)
            i = r.erase(i);
        else
            ++i;
    }
    if (!r.empty()) rows.push_back(std::move(r));
}

Echelon rref(const SparseMatrix& m) {
    std::vector<IntRow> work;
    work.reserve(m.rows.size());
    for (const auto& r : m.rows) {
        IntRow p = primitive(r);
        if (p.empty()) continue;
        make_primitive(p);
        work.push_back(std::move(p));
    }
    // forward pass, column by column
    std::vector<IntRow> pivot_rows;
    std::vector<std::size_t> pivots;
    std::vector<IntRow> rest = std::move(work);
    while (!rest.empty()) {
        std::size_t col = rest.front().begin()->first;
        for (const auto& r : rest) col = std::min(col, r.begin()->first);
        std::size_t best = rest.size();
        std::size_t best_bits = 0;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            if (rest[i].begin()->first != col) continue;
            std::size_t bits = mpz_sizeinbase(rest[i].begin()->second.get_mpz_t(), 2);
            if (best == rest.size() || bits < best_bits || (bits == best_bits && rest[i].size() < rest[best].size())) {
                best = i;
                best_bits = bits;
            }
        }
        IntRow piv = std::move(rest[best]);
        rest.erase(rest.begin() + static_cast<long>(best));
        std::vector<IntRow> next;
        next.reserve(rest.size());
        for (auto& r : rest) {
            eliminate(r, piv, col);
            if (!r.empty()) next.push_back(std::move(r));
        }
        rest = std::move(next);
        pivot_rows.push_back(std::move(piv));
        pivots.push_back(col);
    }
    // back substitution
    for (std::size_t i = pivot_rows.size(); i-- > 0;)
        for (std::size_t k = 0; k < i; ++k) eliminate(pivot_rows[k], pivot_rows[i], pivots[i]);
    Echelon e;
    e.cols = m.cols;
    e.pivots = pivots;
    for (const auto& r : pivot_rows) {
        SparseRow s;
        const Integer& lead = r.begin()->second;
        for (const auto& [c, v] : r) {
            Scalar q(v, lead);
            q.canonicalize();
            s[c] = q;
        }
        e.rows.push_back(std::move(s));
    }
    return e;
}

std::vector<Vector> nullspace(const SparseMatrix& m) {
    Echelon e = rref(m);
    std::vector<bool> is_pivot(m.cols, false);
    for (auto p : e.pivots) is_pivot[p] = true;
    std::vector<Vector> basis;
    for (std::size_t f = 0; f < m.cols; ++f) {
        if (is_pivot[f]) continue;
        Vector v(m.cols, Scalar(0));
        v[f] = 1;
        for (std::size_t i = 0; i < e.rows.size(); ++i) {
            auto it = e.rows[i].find(f);
            if (it != e.rows[i].end()) v[e.pivots[i]] = -it->second;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<Vector> nullspace(const std::vector<Vector>& rows, std::size_t cols) {
    return nullspace(SparseMatrix::from_dense(rows, cols));
}

std::size_t rank(const SparseMatrix& m) { return rref(m).rank(); }

std::size_t rank(const std::vector<Vector>& rows, std::size_t cols) { return rank(SparseMatrix::from_dense(rows, cols)); }

std::size_t rank_at_point(const std::vector<std::vector<RatFun>>& rows, const std::map<std::string, Scalar>& point) {
    std::size_t cols = 0;
    for (const auto& r : rows) cols = std::max(cols, r.size());
    SparseMatrix m(cols);
    for (const auto& r : rows) {
        SparseRow s;
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (r[j].is_zero()) continue;
            Scalar v = evaluate_exact(r[j], point);
            if (v != 0) s[j] = v;
        }
        m.add_row(std::move(s));
    }
    return rank(m);
}

std::size_t rank_at_point(const std::vector<std::vector<Expr>>& rows, const std::map<std::string, Scalar>& point) {
    std::vector<std::vector<RatFun>> rf;
    for (const auto& r : rows) {
        std::vector<RatFun> out;
        for (const auto& e : r) out.push_back(to_ratfun(e));
        rf.push_back(std::move(out));
    }
    return rank_at_point(rf, point);
}

std::optional<Vector> span_coordinates(const Vector& v, const std::vector<Vector>& basis) {
    std::size_t dim = v.size();
    for (const auto& b : basis)
        if (b.size() != dim) throw ValidationError("span_coordinates: length mismatch");
    // columns are basis vectors plus v as the last column
    std::size_t k = basis.size();
    SparseMatrix m(k + 1);
    for (std::size_t r = 0; r < dim; ++r) {
        SparseRow row;
        for (std::size_t j = 0; j < k; ++j)
            if (basis[j][r] != 0) row[j] = basis[j][r];
        if (v[r] != 0) row[k] = v[r];
        m.add_row(std::move(row));
    }
    Echelon e = rref(m);
    std::size_t basis_rank = 0;
    for (auto p : e.pivots)
        if (p < k) basis_rank++;
    if (basis_rank < k) throw DependentBasis("basis vectors are linearly dependent");
    Vector coords(k, Scalar(0));
    for (std::size_t i = 0; i < e.rows.size(); ++i) {
        if (e.pivots[i] == k) return std::nullopt;
        auto it = e.rows[i].find(k);
        if (it != e.rows[i].end()) coords[e.pivots[i]] = it->second;
    }
    return coords;
}

std::vector<Vector> span_basis(const std::vector<Vector>& vectors, std::size_t dim) {
    Echelon e = rref(SparseMatrix::from_dense(vectors, dim));
    std::vector<Vector> out;
    for (const auto& r : e.rows) {
        Vector v(dim, Scalar(0));
        for (const auto& [c, x] : r) v[c] = x;
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace liesym
