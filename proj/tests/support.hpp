#pragma once

#include "liesym/detsys.hpp"
#include "liesym/expr_ops.hpp"
#include "liesym/parse.hpp"
#include "liesym/vfield.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace liesym::test {

inline std::string problem_path(const std::string& name) { return std::string(LIESYM_PROBLEMS_DIR) + "/" + name; }

inline ProblemSpec load_problem(const std::string& name) {
    std::ifstream in(problem_path(name));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

inline SymbolContext ctx_of(std::vector<std::string> xs, std::vector<std::string> us) {
    SymbolContext c;
    c.independents = std::move(xs);
    c.dependents = std::move(us);
    return c;
}

inline Expr P(const std::string& s, const SymbolContext& c) { return parse_expression(s, c); }

inline VectorField F(const std::string& s, const SymbolContext& c) { return parse_vector_field(s, c); }

inline bool same(const Expr& a, const Expr& b) { return normalize(a - b).is_zero(); }

/// True when every target lies in the span of gens (constant coefficients).
inline bool in_span(const std::vector<VectorField>& gens, const VectorField& target) {
    std::vector<VectorField> all = gens;
    all.push_back(target);
    auto vecs = coefficient_vectors(all);
    Vector t = vecs.back();
    vecs.pop_back();
    auto basis = span_basis(vecs, t.size());
    return span_coordinates(t, basis).has_value();
}

inline std::size_t span_dim(const std::vector<VectorField>& fs) {
    if (fs.empty()) return 0;
    auto vecs = coefficient_vectors(fs);
    return rank(vecs, vecs.front().size());
}

/// Random polynomial in the given atoms with small integer coefficients.
inline Expr random_poly(std::mt19937_64& rng, const std::vector<Expr>& atoms, int terms, int max_deg) {
    std::uniform_int_distribution<int> coef(-5, 5), deg(0, max_deg), pick(0, static_cast<int>(atoms.size()) - 1);
    Expr e(0);
    for (int t = 0; t < terms; ++t) {
        Expr m(coef(rng));
        int d = deg(rng);
        for (int k = 0; k < d; ++k) m = m * atoms[pick(rng)];
        e = e + m;
    }
    return e;
}

/// Random expression tree: sums, products, quotients, powers and kernels.
inline Expr random_expr(std::mt19937_64& rng, const std::vector<Expr>& atoms, int depth) {
    std::uniform_int_distribution<int> op(0, depth <= 0 ? 1 : 8), small(-4, 6), pick(0, static_cast<int>(atoms.size()) - 1);
    switch (op(rng)) {
    case 0: return Expr(make_scalar(small(rng), 1 + std::abs(small(rng)) % 3));
    case 1: return atoms[pick(rng)];
    case 2: return random_expr(rng, atoms, depth - 1) + random_expr(rng, atoms, depth - 1);
    case 3: return random_expr(rng, atoms, depth - 1) - random_expr(rng, atoms, depth - 1);
    case 4: return random_expr(rng, atoms, depth - 1) * random_expr(rng, atoms, depth - 1);
    case 5: {
        Expr d = random_expr(rng, atoms, depth - 1);
        if (normalize(d).is_zero()) d = Expr(2);
        return random_expr(rng, atoms, depth - 1) / d;
    }
    case 6: return pow(random_expr(rng, atoms, depth - 1), Scalar(1 + std::abs(small(rng)) % 3));
    case 7: return exp(random_expr(rng, atoms, depth - 1));
    default: return sin(random_expr(rng, atoms, depth - 1)) * atoms[pick(rng)];
    }
}

inline VectorField random_field(std::mt19937_64& rng, const JetSpace& sp, int terms, int max_deg) {
    std::vector<Expr> atoms;
    for (int i = 0; i < sp.p(); ++i) atoms.push_back(sp.x(i));
    for (int a = 0; a < sp.q(); ++a) atoms.push_back(sp.u(a));
    VectorField v = zero_field(sp);
    for (auto& c : v.xi) c = random_poly(rng, atoms, terms, max_deg);
    for (auto& c : v.phi) c = random_poly(rng, atoms, terms, max_deg);
    return v;
}

} // namespace liesym::test
