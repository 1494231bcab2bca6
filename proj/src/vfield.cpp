#include "liesym/vfield.hpp"

#include "liesym/errors.hpp"
#include "liesym/expr_ops.hpp"

namespace liesym {

VectorField zero_field(const JetSpace& space) {
    VectorField v;
    v.xi.assign(static_cast<std::size_t>(space.p()), Expr(0));
    v.phi.assign(static_cast<std::size_t>(space.q()), Expr(0));
    return v;
}

VectorField unit_field(const JetSpace& space, std::size_t k) {
    VectorField v = zero_field(space);
    if (k < v.xi.size())
        v.xi[k] = Expr(1);
    else
        v.phi[k - v.xi.size()] = Expr(1);
    return v;
}

namespace {

template <class F>
VectorField map2(const VectorField& a, const VectorField& b, F f) {
    VectorField r;
    for (std::size_t i = 0; i < a.xi.size(); ++i) r.xi.push_back(f(a.xi[i], b.xi[i]));
    for (std::size_t i = 0; i < a.phi.size(); ++i) r.phi.push_back(f(a.phi[i], b.phi[i]));
    return r;
}

std::vector<int> base_atoms(const JetSpace& space) {
    std::vector<int> ids;
    for (int i = 0; i < space.p(); ++i) ids.push_back(space.x(i).sym().atom_id);
    for (int a = 0; a < space.q(); ++a) ids.push_back(space.u(a).sym().atom_id);
    return ids;
}

std::vector<RatFun> coeffs_rf(const VectorField& v) {
    std::vector<RatFun> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(to_ratfun(v.coeff(k)));
    return out;
}

} // namespace

VectorField operator+(const VectorField& a, const VectorField& b) {
    return map2(a, b, [](const Expr& x, const Expr& y) { return normalize(x + y); });
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    return map2(a, b, [](const Expr& x, const Expr& y) { return normalize(x - y); });
}

VectorField operator*(const Expr& c, const VectorField& v) {
    VectorField r;
    for (const auto& e : v.xi) r.xi.push_back(normalize(c * e));
    for (const auto& e : v.phi) r.phi.push_back(normalize(c * e));
    return r;
}

VectorField normalize(const VectorField& v) {
    VectorField r;
    for (const auto& e : v.xi) r.xi.push_back(normalize(e));
    for (const auto& e : v.phi) r.phi.push_back(normalize(e));
    return r;
}

bool is_zero(const VectorField& v) {
    for (std::size_t k = 0; k < v.size(); ++k)
        if (!to_ratfun(v.coeff(k)).is_zero()) return false;
    return true;
}

bool fields_equal(const VectorField& a, const VectorField& b) {
    if (a.xi.size() != b.xi.size() || a.phi.size() != b.phi.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (to_ratfun(a.coeff(k)) != to_ratfun(b.coeff(k))) return false;
    return true;
}

VectorField linear_combination(const std::vector<Scalar>& c, const std::vector<VectorField>& fields) {
    if (fields.empty()) throw InternalError("linear_combination of no fields");
    std::vector<RatFun> acc(fields.front().size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
        if (c[j] == 0) continue;
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += to_ratfun(fields[j].coeff(k)) * RatFun(c[j]);
    }
    VectorField r;
    std::size_t p = fields.front().xi.size();
    for (std::size_t k = 0; k < acc.size(); ++k) (k < p ? r.xi : r.phi).push_back(to_expr(acc[k]));
    return r;
}

std::vector<Vector> coefficient_vectors(const std::vector<VectorField>& fields) {
    std::vector<std::vector<RatFun>> rf;
    Poly lcd(Scalar(1));
    for (const auto& f : fields) {
        rf.push_back(coeffs_rf(f));
        for (const auto& c : rf.back()) lcd = poly_lcm(lcd, c.den());
    }
    std::map<std::pair<std::size_t, Monomial>, std::size_t> index;
    std::vector<std::map<std::size_t, Scalar>> sparse;
    for (const auto& cs : rf) {
        std::map<std::size_t, Scalar> row;
        for (std::size_t k = 0; k < cs.size(); ++k) {
            if (cs[k].is_zero()) continue;
            Poly p = cs[k].num() * exact_divide(lcd, cs[k].den());
            for (const auto& [m, c] : p.terms()) {
                auto key = std::make_pair(k, m);
                auto it = index.find(key);
                if (it == index.end()) it = index.emplace(key, index.size()).first;
                row[it->second] = c;
            }
        }
        sparse.push_back(std::move(row));
    }
    std::vector<Vector> out;
    for (const auto& row : sparse) {
        Vector v(index.size(), Scalar(0));
        for (const auto& [j, c] : row) v[j] = c;
        out.push_back(std::move(v));
    }
    return out;
}

std::string render_field(const VectorField& v, const JetSpace& space) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        Expr c = normalize(v.coeff(k));
        if (c.is_zero()) continue;
        std::string name = k < v.xi.size() ? space.independents[k] : space.dependents[k - v.xi.size()];
        std::string body = render(c);
        bool neg = !body.empty() && body[0] == '-';
        if (neg && c.kind() != NodeKind::Sum) body = body.substr(1);
        else neg = false;
        if (c.kind() == NodeKind::Sum) body = "(" + body + ")";
        if (body == "1") body.clear();
        if (out.empty())
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        out += body + "@" + name;
    }
    return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------- prolongation

RatFun ProlongedField::coefficient(int alpha, const std::vector<int>& counts) const {
    int order = 0;
    for (int c : counts) order += c;
    if (order == 0) return to_ratfun(base.phi.at(static_cast<std::size_t>(alpha)));
    for (const auto& e : entries)
        if (e.coord.alpha == alpha && e.coord.counts == counts) return e.coeff;
    return RatFun();
}

Expr ProlongedField::coefficient(const Expr& var) const {
    for (const auto& e : entries)
        if (e.var == var) return to_expr(e.coeff);
    return Expr(0);
}

namespace {

std::vector<RatFun> characteristic_rf(const VectorField& v, const JetSpace& space) {
    std::vector<RatFun> Q;
    for (int a = 0; a < space.q(); ++a) {
        RatFun q = to_ratfun(v.phi[static_cast<std::size_t>(a)]);
        for (int i = 0; i < space.p(); ++i) {
            std::vector<int> c(static_cast<std::size_t>(space.p()), 0);
            c[static_cast<std::size_t>(i)] = 1;
            q -= to_ratfun(v.xi[static_cast<std::size_t>(i)]) * to_ratfun(space.var(a, c));
        }
        Q.push_back(q);
    }
    return Q;
}

std::vector<int> plus_unit(std::vector<int> c, int i) {
    c[static_cast<std::size_t>(i)]++;
    return c;
}

ProlongedField prolong_recursive(const VectorField& v, int n, const JetSpace& space) {
    ProlongedField pf;
    pf.base = v;
    pf.n = n;
    std::vector<RatFun> xi;
    for (const auto& e : v.xi) xi.push_back(to_ratfun(e));
    // D_i xi_k, reused at every order
    std::vector<std::vector<RatFun>> dxi(static_cast<std::size_t>(space.p()));
    for (int i = 0; i < space.p(); ++i)
        for (int k = 0; k < space.p(); ++k) dxi[static_cast<std::size_t>(i)].push_back(total_derivative(xi[static_cast<std::size_t>(k)], i, space));
    std::map<std::pair<int, std::vector<int>>, RatFun> known;
    for (int a = 0; a < space.q(); ++a)
        known[{a, std::vector<int>(static_cast<std::size_t>(space.p()), 0)}] = to_ratfun(v.phi[static_cast<std::size_t>(a)]);
    for (int order = 1; order <= n; ++order) {
        for (const auto& J : space.multi_indices(order)) {
            int i = 0;
            while (J[static_cast<std::size_t>(i)] == 0) ++i;
            std::vector<int> prev = J;
            prev[static_cast<std::size_t>(i)]--;
            for (int a = 0; a < space.q(); ++a) {
                RatFun c = total_derivative(known.at({a, prev}), i, space);
                for (int k = 0; k < space.p(); ++k) {
                    const RatFun& d = dxi[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                    if (d.is_zero()) continue;
                    c -= d * to_ratfun(space.var(a, plus_unit(prev, k)));
                }
                known[{a, J}] = c;
                pf.entries.push_back({JetCoord{a, J}, space.var(a, J), c});
            }
        }
    }
    return pf;
}

ProlongedField prolong_direct(const VectorField& v, int n, const JetSpace& space) {
    ProlongedField pf;
    pf.base = v;
    pf.n = n;
    std::vector<RatFun> xi;
    for (const auto& e : v.xi) xi.push_back(to_ratfun(e));
    for (int order = 1; order <= n; ++order) {
        for (const auto& J : space.multi_indices(order)) {
            for (int a = 0; a < space.q(); ++a) {
                RatFun c = total_derivative(to_ratfun(v.phi[static_cast<std::size_t>(a)]), J, space);
                // every K with 0 < K <= J
                for (int ko = 1; ko <= order; ++ko) {
                    for (const auto& K : space.multi_indices(ko)) {
                        long coef = 1;
                        bool inside = true;
                        std::vector<int> rest(J.size());
                        for (std::size_t l = 0; l < J.size(); ++l) {
                            if (K[l] > J[l]) inside = false;
                            rest[l] = J[l] - K[l];
                            coef *= binomial(J[l], K[l]);
                        }
                        if (!inside) continue;
                        for (int i = 0; i < space.p(); ++i) {
                            RatFun dk = total_derivative(xi[static_cast<std::size_t>(i)], K, space);
                            if (dk.is_zero()) continue;
                            c -= RatFun(Scalar(coef)) * dk * to_ratfun(space.var(a, plus_unit(rest, i)));
                        }
                    }
                }
                pf.entries.push_back({JetCoord{a, J}, space.var(a, J), c});
            }
        }
    }
    return pf;
}

ProlongedField prolong_characteristic(const VectorField& v, int n, const JetSpace& space) {
    ProlongedField pf;
    pf.base = v;
    pf.n = n;
    std::vector<RatFun> Q = characteristic_rf(v, space);
    for (int order = 1; order <= n; ++order) {
        for (const auto& J : space.multi_indices(order)) {
            for (int a = 0; a < space.q(); ++a) {
                RatFun c = total_derivative(Q[static_cast<std::size_t>(a)], J, space);
                for (int i = 0; i < space.p(); ++i)
                    c += to_ratfun(v.xi[static_cast<std::size_t>(i)]) * to_ratfun(space.var(a, plus_unit(J, i)));
                pf.entries.push_back({JetCoord{a, J}, space.var(a, J), c});
            }
        }
    }
    return pf;
}

} // namespace

ProlongedField prolong(const VectorField& v, int n, const JetSpace& space, ProlongMethod method, bool verify) {
    if (n < 0) throw ValidationError("prolongation order must be non-negative");
    ProlongedField out;
    switch (method) {
    case ProlongMethod::Recursive: out = prolong_recursive(v, n, space); break;
    case ProlongMethod::Direct: out = prolong_direct(v, n, space); break;
    case ProlongMethod::Characteristic: out = prolong_characteristic(v, n, space); break;
    }
    if (verify) {
        ProlongedField a = prolong_recursive(v, n, space);
        ProlongedField b = prolong_direct(v, n, space);
        ProlongedField c = prolong_characteristic(v, n, space);
        for (std::size_t k = 0; k < a.entries.size(); ++k) {
            if (a.entries[k].coeff != b.entries[k].coeff || a.entries[k].coeff != c.entries[k].coeff)
                throw InternalError("prolongation formulas disagree at " + render(a.entries[k].var));
        }
    }
    return out;
}

std::vector<Expr> characteristic(const VectorField& v, const JetSpace& space) {
    std::vector<Expr> out;
    for (const auto& q : characteristic_rf(v, space)) out.push_back(to_expr(q));
    return out;
}

RatFun apply_field(const VectorField& v, const RatFun& f, const JetSpace& space) {
    std::vector<int> ids = base_atoms(space);
    RatFun out;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (!depends_on(f, ids[k])) continue;
        RatFun c = to_ratfun(v.coeff(k));
        if (c.is_zero()) continue;
        out += c * diff(f, ids[k]);
    }
    return out;
}

RatFun apply_prolonged(const ProlongedField& v, const RatFun& f, const JetSpace& space) {
    RatFun out = apply_field(v.base, f, space);
    for (const auto& e : v.entries) {
        int id = e.var.sym().atom_id;
        if (e.coeff.is_zero() || !depends_on(f, id)) continue;
        out += e.coeff * diff(f, id);
    }
    return out;
}

VectorField bracket(const VectorField& v, const VectorField& w, const JetSpace& space) {
    VectorField r;
    std::vector<RatFun> vc = coeffs_rf(v), wc = coeffs_rf(w);
    for (std::size_t k = 0; k < vc.size(); ++k) {
        RatFun c = apply_field(v, wc[k], space) - apply_field(w, vc[k], space);
        (k < v.xi.size() ? r.xi : r.phi).push_back(to_expr(c));
    }
    return r;
}

Expr lie_derivative(const VectorField& v, const Expr& f, const JetSpace& space) {
    RatFun r = to_ratfun(f);
    if (differential_order(r) > 0) throw OrderMismatch("expression involves derivatives; prolong the field first");
    return to_expr(apply_field(v, r, space));
}

Expr lie_derivative(const ProlongedField& v, const Expr& f, const JetSpace& space) {
    RatFun r = to_ratfun(f);
    if (differential_order(r) > v.n)
        throw OrderMismatch("expression of order " + std::to_string(differential_order(r)) +
                            " exceeds prolongation order " + std::to_string(v.n));
    return to_expr(apply_prolonged(v, r, space));
}

VectorField pushforward(const VectorField& v, const JetSpace& space, const std::vector<Expr>& psi,
                        const std::vector<Expr>& inverse, const JetSpace& target, bool* probabilistic) {
    std::size_t m = v.size();
    if (psi.size() != m || inverse.size() != m) throw ValidationError("pushforward: map has the wrong number of components");
    std::vector<int> old_ids = base_atoms(space), new_ids = base_atoms(target);
    std::unordered_map<int, RatFun> back;
    for (std::size_t k = 0; k < m; ++k) back[old_ids[k]] = to_ratfun(inverse[k]);
    bool prob = false;
    for (std::size_t k = 0; k < m; ++k) {
        RatFun comp = substitute(to_ratfun(psi[k]), back);
        EquivalenceResult r = zero_test(comp, RatFun::from_atom(new_ids[k]));
        if (r.branch == EqualityBranch::Probabilistic) prob = true;
        if (!r.equal) throw NotInverse("component " + std::to_string(k + 1) + " of psi(inverse) is " + render(to_expr(comp)));
    }
    if (probabilistic) *probabilistic = prob;
    VectorField out;
    for (std::size_t k = 0; k < m; ++k) {
        RatFun c = substitute(apply_field(v, to_ratfun(psi[k]), space), back);
        (k < target.independents.size() ? out.xi : out.phi).push_back(to_expr(c));
    }
    return out;
}

bool rectify_check(const VectorField& v, const Expr& r, const Expr& s, const JetSpace& space, bool* probabilistic) {
    RatFun vr = apply_field(v, to_ratfun(r), space);
    RatFun vs = apply_field(v, to_ratfun(s), space);
    EquivalenceResult a = zero_test(vr, RatFun());
    EquivalenceResult b = zero_test(vs, RatFun(Scalar(1)));
    if (probabilistic)
        *probabilistic = a.branch == EqualityBranch::Probabilistic || b.branch == EqualityBranch::Probabilistic;
    return a.equal && b.equal;
}

Expr flow_series(const VectorField& v, const Expr& f, const Expr& t, int N, const JetSpace& space) {
    if (N < 0) throw ValidationError("flow_series order must be non-negative");
    RatFun term = to_ratfun(f), tr = to_ratfun(t);
    RatFun out = term;
    Scalar fact(1);
    for (int j = 1; j <= N; ++j) {
        term = apply_field(v, term, space);
        fact *= j;
        if (term.is_zero()) break;
        out += term * tr.pow(j) * RatFun(Scalar(1) / fact);
    }
    return to_expr(out);
}

} // namespace liesym
