#include "liesym/algebra.hpp"

#include "liesym/errors.hpp"
#include "liesym/expr_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liesym {

namespace {

Vector unit(std::size_t d, std::size_t i) {
    Vector v(d, Scalar(0));
    v[i] = 1;
    return v;
}

bool is_zero_vec(const Vector& v) {
    return std::all_of(v.begin(), v.end(), [](const Scalar& s) { return s == 0; });
}

std::vector<std::string> default_names(std::size_t n, std::vector<std::string> names) {
    if (names.empty())
        for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i + 1));
    if (names.size() != n) throw ValidationError("wrong number of basis names");
    return names;
}

} // namespace

Vector LieAlgebra::bracket(const Vector& a, const Vector& b) const {
    std::size_t d = dim();
    Vector out(d, Scalar(0));
    for (std::size_t i = 0; i < d; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < d; ++j) {
            if (b[j] == 0) continue;
            Scalar f = a[i] * b[j];
            for (std::size_t k = 0; k < d; ++k)
                if (c[i][j][k] != 0) out[k] += f * c[i][j][k];
        }
    }
    return out;
}

std::vector<Vector> LieAlgebra::ad(const Vector& a) const {
    std::size_t d = dim();
    std::vector<Vector> m(d, Vector(d, Scalar(0)));
    for (std::size_t j = 0; j < d; ++j) {
        Vector col = bracket(a, unit(d, j));
        for (std::size_t k = 0; k < d; ++k) m[k][j] = col[k];
    }
    return m;
}

void verify_lie_identities(const LieAlgebra& g) {
    std::size_t d = g.dim();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k)
                if (g.c[i][j][k] != -g.c[j][i][k]) throw InternalError("structure constants are not antisymmetric");
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            for (std::size_t k = j + 1; k < d; ++k) {
                Vector ei = unit(d, i), ej = unit(d, j), ek = unit(d, k);
                Vector s(d, Scalar(0));
                Vector t1 = g.bracket(ei, g.bracket(ej, ek)), t2 = g.bracket(ej, g.bracket(ek, ei)),
                       t3 = g.bracket(ek, g.bracket(ei, ej));
                for (std::size_t m = 0; m < d; ++m) s[m] = t1[m] + t2[m] + t3[m];
                if (!is_zero_vec(s))
                    throw InternalError("Jacobi identity fails for basis elements " + std::to_string(i + 1) + ", " +
                                        std::to_string(j + 1) + ", " + std::to_string(k + 1));
            }
}

LieAlgebra structure_constants(const std::vector<VectorField>& basis, const JetSpace& space, std::vector<std::string> names) {
    std::size_t n = basis.size();
    LieAlgebra g;
    g.basis = basis;
    g.space = space;
    g.names = default_names(n, std::move(names));
    std::vector<VectorField> all = basis;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            all.push_back(bracket(basis[i], basis[j], space));
            pairs.emplace_back(i, j);
        }
    std::vector<Vector> cv = coefficient_vectors(all);
    std::vector<Vector> bvec(cv.begin(), cv.begin() + static_cast<long>(n));
    std::size_t cols = cv.empty() ? 0 : cv[0].size();
    if (rank(bvec, cols) < n) throw DependentBasis("basis fields are linearly dependent");
    g.c.assign(n, std::vector<Vector>(n, Vector(n, Scalar(0))));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        auto [i, j] = pairs[p];
        auto coords = span_coordinates(cv[n + p], bvec);
        if (!coords)
            throw NotClosed("[" + g.names[i] + ", " + g.names[j] + "] = " + render_field(all[n + p], space) +
                            " is not in the span of the basis");
        g.c[i][j] = *coords;
        for (std::size_t k = 0; k < n; ++k) g.c[j][i][k] = -(*coords)[k];
    }
    verify_lie_identities(g);
    return g;
}

LieAlgebra algebra_from_brackets(std::size_t dim, const std::vector<std::tuple<std::size_t, std::size_t, Vector>>& brackets,
                                 std::vector<std::string> names) {
    LieAlgebra g;
    g.names = default_names(dim, std::move(names));
    g.c.assign(dim, std::vector<Vector>(dim, Vector(dim, Scalar(0))));
    for (const auto& [i, j, v] : brackets) {
        if (i >= dim || j >= dim || v.size() != dim) throw ValidationError("bracket out of range");
        g.c[i][j] = v;
        for (std::size_t k = 0; k < dim; ++k) g.c[j][i][k] = -v[k];
    }
    verify_lie_identities(g);
    return g;
}

std::string render_combination(const Vector& coords, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const Scalar& c = coords[i];
        if (c == 0) continue;
        bool neg = c < 0;
        Scalar a = neg ? Scalar(-c) : c;
        std::string term;
        if (a.get_num() != 1) term = a.get_num().get_str() + "*";
        term += names[i];
        if (a.get_den() != 1) term += "/" + a.get_den().get_str();
        if (out.empty())
            out = neg ? "-" + term : term;
        else
            out += (neg ? " - " : " + ") + term;
    }
    return out.empty() ? "0" : out;
}

std::string commutator_table(const LieAlgebra& g) {
    std::size_t d = g.dim();
    std::vector<std::vector<std::string>> cells(d + 1, std::vector<std::string>(d + 1));
    for (std::size_t i = 0; i < d; ++i) {
        cells[0][i + 1] = g.names[i];
        cells[i + 1][0] = g.names[i];
        for (std::size_t j = 0; j < d; ++j) cells[i + 1][j + 1] = render_combination(g.c[i][j], g.names);
    }
    std::vector<std::size_t> width(d + 1, 0);
    for (const auto& row : cells)
        for (std::size_t j = 0; j <= d; ++j) width[j] = std::max(width[j], row[j].size());
    std::ostringstream os;
    for (const auto& row : cells) {
        for (std::size_t j = 0; j <= d; ++j) {
            os << row[j];
            if (j < d) os << std::string(width[j] - row[j].size() + 2, ' ');
        }
        os << "\n";
    }
    return os.str();
}

std::vector<std::size_t> DerivedSeries::dims() const {
    std::vector<std::size_t> d;
    for (const auto& s : chain) d.push_back(s.size());
    return d;
}

Subspace bracket_span(const LieAlgebra& g, const Subspace& a, const Subspace& b) {
    std::vector<Vector> vs;
    for (const auto& x : a)
        for (const auto& y : b) vs.push_back(g.bracket(x, y));
    return span_basis(vs, g.dim());
}

DerivedSeries derived_series(const LieAlgebra& g) {
    DerivedSeries s;
    Subspace cur;
    for (std::size_t i = 0; i < g.dim(); ++i) cur.push_back(unit(g.dim(), i));
    s.chain.push_back(cur);
    while (!cur.empty()) {
        Subspace next = bracket_span(g, cur, cur);
        bool stable = next.size() == cur.size();
        s.chain.push_back(next);
        cur = std::move(next);
        if (stable) break;
    }
    s.solvable = s.chain.back().empty();
    return s;
}

Subspace center(const LieAlgebra& g) {
    std::size_t d = g.dim();
    std::vector<Vector> rows;
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
            Vector r(d, Scalar(0));
            for (std::size_t i = 0; i < d; ++i) r[i] = g.c[i][j][k];
            rows.push_back(r);
        }
    return span_basis(nullspace(rows, d), d);
}

bool is_subalgebra(const LieAlgebra& g, const Subspace& h) {
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t j = i + 1; j < h.size(); ++j)
            if (!span_coordinates(g.bracket(h[i], h[j]), h)) return false;
    return true;
}

Subspace normalizer(const LieAlgebra& g, const Subspace& h_in) {
    std::size_t d = g.dim();
    Subspace h = span_basis(h_in, d);
    if (!is_subalgebra(g, h)) throw NotClosed("the given subspace is not closed under the bracket");
    std::size_t k = h.size();
    // unknowns: a (d entries), then lambda[j][l] (k*k entries)
    std::size_t cols = d + k * k;
    std::vector<Vector> rows;
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<Vector> br;
        for (std::size_t i = 0; i < d; ++i) br.push_back(g.bracket(unit(d, i), h[j]));
        for (std::size_t comp = 0; comp < d; ++comp) {
            Vector r(cols, Scalar(0));
            for (std::size_t i = 0; i < d; ++i) r[i] = br[i][comp];
            for (std::size_t l = 0; l < k; ++l) r[d + j * k + l] = -h[l][comp];
            rows.push_back(r);
        }
    }
    std::vector<Vector> proj;
    for (const auto& v : nullspace(rows, cols)) proj.emplace_back(v.begin(), v.begin() + static_cast<long>(d));
    return span_basis(proj, d);
}

bool is_nilpotent(const std::vector<Vector>& m) {
    std::size_t d = m.size();
    std::vector<Vector> p = m;
    for (std::size_t step = 1; step < d; ++step) {
        std::vector<Vector> q(d, Vector(d, Scalar(0)));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t l = 0; l < d; ++l) {
                if (p[i][l] == 0) continue;
                for (std::size_t j = 0; j < d; ++j)
                    if (m[l][j] != 0) q[i][j] += p[i][l] * m[l][j];
            }
        p = std::move(q);
    }
    for (const auto& r : p)
        if (!is_zero_vec(r)) return false;
    return true;
}

AdjointResult adjoint_exact(const LieAlgebra& g, const Vector& v, const Vector& w, const Expr& eps) {
    std::size_t d = g.dim();
    auto m = g.ad(v);
    if (d > 0 && !is_nilpotent(m)) throw NotNilpotent("ad(v) is not nilpotent; the series does not terminate");
    std::vector<std::vector<Expr>> parts(d);
    Vector term = w;
    Scalar fact = 1;
    for (std::size_t n = 0; n <= d && !is_zero_vec(term); ++n) {
        Expr pw = pow(eps, Scalar(static_cast<long>(n)));
        for (std::size_t i = 0; i < d; ++i)
            if (term[i] != 0) parts[i].push_back(Expr(Scalar(term[i] / fact)) * pw);
        Vector next(d, Scalar(0));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                if (m[i][j] != 0 && term[j] != 0) next[i] += m[i][j] * term[j];
        term = std::move(next);
        fact *= static_cast<long>(n + 1);
    }
    AdjointResult r;
    r.mode = AdjointMode::Exact;
    for (auto& p : parts) r.exact.push_back(normalize(Expr::sum(p)));
    return r;
}

std::vector<std::vector<double>> matrix_exp(const std::vector<std::vector<double>>& m) {
    std::size_t d = m.size();
    auto mul = [d](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
        std::vector<std::vector<double>> c(d, std::vector<double>(d, 0.0));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t l = 0; l < d; ++l)
                for (std::size_t j = 0; j < d; ++j) c[i][j] += a[i][l] * b[l][j];
        return c;
    };
    double norm = 0;
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < d; ++i) s += std::fabs(m[i][j]);
        norm = std::max(norm, s);
    }
    int squarings = norm > 0.5 ? static_cast<int>(std::ceil(std::log2(norm / 0.5))) : 0;
    double scale = std::ldexp(1.0, -squarings);
    std::vector<std::vector<double>> a(d, std::vector<double>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) a[i][j] = m[i][j] * scale;
    std::vector<std::vector<double>> result(d, std::vector<double>(d, 0.0)), term(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) result[i][i] = term[i][i] = 1.0;
    for (int k = 1; k <= 30; ++k) {
        term = mul(term, a);
        double tn = 0;
        for (auto& row : term)
            for (auto& x : row) {
                x /= k;
                tn = std::max(tn, std::fabs(x));
            }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) result[i][j] += term[i][j];
        if (tn < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) result = mul(result, result);
    return result;
}

AdjointResult adjoint_numeric(const LieAlgebra& g, const Vector& v, const Vector& w, double eps) {
    std::size_t d = g.dim();
    auto m = g.ad(v);
    std::vector<std::vector<double>> md(d, std::vector<double>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) md[i][j] = eps * m[i][j].get_d();
    auto e = matrix_exp(md);
    AdjointResult r;
    r.mode = AdjointMode::Numeric;
    r.numeric.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) r.numeric[i] += e[i][j] * w[j].get_d();
    return r;
}

const char* realization_name(Realization r) {
    switch (r) {
    case Realization::A21: return "A2,1";
    case Realization::A22: return "A2,2";
    case Realization::A23: return "A2,3";
    case Realization::A24: return "A2,4";
    }
    return "?";
}

Classification2D classify_2d(const VectorField& v1, const VectorField& v2, const JetSpace& space, std::uint64_t seed) {
    if (space.p() != 1 || space.q() != 1) throw NotTwoDimensional("classification needs one independent and one dependent variable");
    VectorField b = bracket(v1, v2, space);
    auto cv = coefficient_vectors({v1, v2, b});
    std::size_t cols = cv[0].size();
    if (rank({cv[0], cv[1]}, cols) < 2) throw NotTwoDimensional("the two fields are linearly dependent");
    auto coords = span_coordinates(cv[2], {cv[0], cv[1]});
    if (!coords) throw NotClosed("[v1, v2] = " + render_field(b, space) + " is not in span{v1, v2}");
    Classification2D out;
    out.bracket = *coords;
    out.abelian = is_zero_vec(*coords);
    // rank of the coefficient matrix via its determinant
    RatFun det = to_ratfun(v1.xi[0]) * to_ratfun(v2.phi[0]) - to_ratfun(v1.phi[0]) * to_ratfun(v2.xi[0]);
    out.seeds = {seed};
    out.connected = zero_test(det, RatFun(), seed).equal;
    out.rank = out.connected ? 1 : 2;
    if (out.abelian)
        out.tag = out.connected ? Realization::A22 : Realization::A21;
    else
        out.tag = out.connected ? Realization::A24 : Realization::A23;
    return out;
}

} // namespace liesym
