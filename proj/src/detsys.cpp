#include "liesym/detsys.hpp"

#include "liesym/errors.hpp"
#include "liesym/expr_ops.hpp"
#include "liesym/linsolve.hpp"

#include <algorithm>
#include <set>

namespace liesym {

namespace {

std::vector<int> base_ids(const JetSpace& space) {
    std::vector<int> ids;
    for (int i = 0; i < space.p(); ++i) ids.push_back(space.x(i).sym().atom_id);
    for (int a = 0; a < space.q(); ++a) ids.push_back(space.u(a).sym().atom_id);
    return ids;
}

Monomial without(const Monomial& m, int id) {
    Monomial out;
    for (const auto& t : m)
        if (t.first != id) out.push_back(t);
    return out;
}

bool is_parametric(int a) { return atom(a).jet_order > 0; }

} // namespace

RatFun leading_solve(const RatFun& e, const Expr& lead) {
    if (lead.kind() != NodeKind::Symbol) throw ValidationError("leading term must be a jet variable");
    int id = lead.sym().atom_id;
    if (depends_on(RatFun(e.den()), id)) throw NonAffineLeading(lead.name() + " occurs in a denominator");
    for (int a : e.num().atoms())
        if (a != id && atom_depends_on(a, id)) throw NonAffineLeading(lead.name() + " occurs inside a function");
    int deg = e.num().degree_in(id);
    if (deg > 1) throw NonAffineLeading("equation is of degree " + std::to_string(deg) + " in " + lead.name());
    if (deg == 0) throw ZeroLeadingCoefficient("coefficient of " + lead.name() + " vanishes");
    Poly a, b;
    for (const auto& [m, c] : e.num().terms()) {
        if (mono_degree(m, id) == 1)
            a.add_term(without(m, id), c);
        else
            b.add_term(m, c);
    }
    return -RatFun(b) / RatFun(a);
}

Expr leading_solve(const Expr& e, const Expr& lead) { return to_expr(leading_solve(to_ratfun(e), lead)); }

DiffSystem DiffSystem::make(const JetSpace& base, const std::vector<std::pair<Expr, Expr>>& eqs) {
    DiffSystem sys;
    sys.space = base;
    sys.space.n = 0;
    std::set<int> leads;
    for (const auto& [e, lead] : eqs) {
        DiffEquation d;
        d.expr = to_ratfun(e);
        d.lead = lead;
        if (lead.kind() != NodeKind::Symbol) throw ValidationError("leading term must be a jet variable");
        auto jc = jet_coord(lead.sym(), base);
        if (!jc || jc->order() == 0) throw ValidationError(lead.name() + " is not a derivative of an unknown");
        if (!leads.insert(lead.sym().atom_id).second) throw ValidationError("leading derivative " + lead.name() + " used twice");
        d.lead_coord = *jc;
        d.solved = leading_solve(d.expr, lead);
        sys.space.n = std::max(sys.space.n, differential_order(d.expr));
        sys.equations.push_back(std::move(d));
    }
    return sys;
}

DiffSystem DiffSystem::from_problem(const ProblemSpec& spec) {
    std::vector<std::pair<Expr, Expr>> eqs;
    for (const auto& e : spec.equations) eqs.emplace_back(e.expr(), e.lead);
    return make(spec.space(0), eqs);
}

RatFun DiffSystem::on_shell(const RatFun& r) const {
    RatFun cur = r;
    for (int round = 0; round < 64; ++round) {
        std::unordered_map<int, RatFun> subs;
        for (int s : symbol_atoms(cur)) {
            const SymbolInfo* info = atom(s).sym;
            if (!info || !info->is_jet()) continue;
            auto jc = jet_coord(*info, space);
            if (!jc) continue;
            for (const auto& eq : equations) {
                if (eq.lead_coord.alpha != jc->alpha) continue;
                std::vector<int> k(jc->counts.size());
                bool above = true;
                for (std::size_t i = 0; i < k.size(); ++i) {
                    k[i] = jc->counts[i] - eq.lead_coord.counts[i];
                    if (k[i] < 0) above = false;
                }
                if (!above) continue;
                subs[s] = total_derivative(eq.solved, k, space);
                break;
            }
        }
        if (subs.empty()) return cur;
        cur = substitute(cur, subs);
    }
    throw ValidationError("leading derivatives keep reappearing; the system is not in solved form");
}

DeterminingSystem determining_system(const DiffSystem& sys) {
    const JetSpace& sp = sys.space;
    DeterminingSystem ds;
    std::vector<Expr> args;
    for (int i = 0; i < sp.p(); ++i) args.push_back(sp.x(i));
    for (int a = 0; a < sp.q(); ++a) args.push_back(sp.u(a));
    for (const auto& x : sp.independents) {
        ds.unknowns.push_back("xi_" + x);
        ds.generic.xi.push_back(Expr::funcsym(ds.unknowns.back(), args));
    }
    for (const auto& u : sp.dependents) {
        ds.unknowns.push_back("phi_" + u);
        ds.generic.phi.push_back(Expr::funcsym(ds.unknowns.back(), args));
    }
    ProlongedField pr = prolong(ds.generic, sp.n, sp);
    for (const auto& eq : sys.equations) {
        RatFun r = sys.on_shell(apply_prolonged(pr, eq.expr, sp));
        if (!r.den().is_constant()) ds.denominators.push_back(poly_to_expr(r.den()));
        std::map<Monomial, Poly, MonoGreater> groups;
        for (const auto& [m, c] : r.num().terms()) {
            Monomial key, rest;
            for (const auto& t : m) (is_parametric(t.first) ? key : rest).push_back(t);
            groups[key].add_term(rest, c);
        }
        for (const auto& [key, coeff] : groups) ds.residuals.push_back(poly_to_expr(coeff));
    }
    return ds;
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Exact: return "exact";
    case Verdict::Relative: return "relative";
    case Verdict::Fail: return "fail";
    }
    return "?";
}

CheckResult symmetry_check(const VectorField& v, const DiffSystem& sys) {
    CheckResult res;
    res.verdict = Verdict::Exact;
    ProlongedField pr = prolong(v, sys.space.n, sys.space);
    for (const auto& eq : sys.equations) {
        RatFun p = apply_prolonged(pr, eq.expr, sys.space);
        EquivalenceResult off = zero_test(p, RatFun());
        if (off.branch == EqualityBranch::Probabilistic) res.probabilistic = true;
        if (off.equal) {
            res.lambda.push_back(Expr(0));
            res.residual.push_back(Expr(0));
            continue;
        }
        RatFun r = sys.on_shell(p);
        EquivalenceResult on = zero_test(r, RatFun());
        if (on.branch == EqualityBranch::Probabilistic) res.probabilistic = true;
        res.residual.push_back(on.equal ? Expr(0) : to_expr(r));
        if (on.equal) {
            res.lambda.push_back(to_expr(p / eq.expr));
            if (res.verdict == Verdict::Exact) res.verdict = Verdict::Relative;
        } else {
            res.lambda.push_back(Expr(0));
            res.verdict = Verdict::Fail;
        }
    }
    return res;
}

const char* profile_name(Profile p) { return p == Profile::Generic ? "generic" : "quasilinear"; }

namespace {

// Monomials of total degree <= d in the given variables, by degree, then lex.
std::vector<Expr> monomials(const std::vector<Expr>& vars, int d) {
    std::vector<Expr> out;
    std::vector<std::vector<int>> level{std::vector<int>(vars.size(), 0)};
    for (int deg = 0; deg <= d; ++deg) {
        for (const auto& e : level) {
            Expr m(1);
            for (std::size_t i = 0; i < vars.size(); ++i)
                if (e[i]) m = m * pow(vars[i], Scalar(e[i]));
            out.push_back(m);
        }
        std::vector<std::vector<int>> next;
        std::set<std::vector<int>> seen;
        for (const auto& e : level)
            for (std::size_t i = 0; i < vars.size(); ++i) {
                auto f = e;
                f[i]++;
                if (seen.insert(f).second) next.push_back(f);
            }
        std::sort(next.begin(), next.end(), std::greater<>());
        level = std::move(next);
    }
    return out;
}

} // namespace

std::vector<std::pair<std::size_t, Expr>> ansatz_terms(const JetSpace& space, const Ansatz& a) {
    if (a.degree < 0) throw ValidationError("ansatz degree must be non-negative");
    std::vector<Expr> xs, us;
    for (int i = 0; i < space.p(); ++i) xs.push_back(space.x(i));
    for (int k = 0; k < space.q(); ++k) us.push_back(space.u(k));
    std::vector<Expr> all = xs;
    all.insert(all.end(), us.begin(), us.end());
    std::vector<std::pair<std::size_t, Expr>> out;
    std::size_t slots = xs.size() + us.size();
    for (std::size_t s = 0; s < slots; ++s) {
        std::vector<Expr> terms;
        if (a.profile == Profile::Generic) {
            terms = monomials(all, a.degree);
        } else {
            terms = monomials(xs, a.degree);
            if (s >= xs.size()) {
                auto poly = terms;
                for (const auto& u : us)
                    for (const auto& m : poly) terms.push_back(m * u);
            }
        }
        std::size_t plain = terms.size();
        for (const auto& f : a.extra) {
            if (differential_order(f) > 0) throw ValidationError("extra basis functions may not contain derivatives");
            for (std::size_t i = 0; i < plain; ++i) terms.push_back(normalize(f * terms[i]));
        }
        for (auto& t : terms) out.emplace_back(s, t);
    }
    return out;
}

std::vector<VectorField> SymmetryBasis::fields() const {
    std::vector<VectorField> out;
    for (const auto& g : generators) out.push_back(g.field);
    return out;
}

std::vector<VectorField> SymmetryBasis::structural() const {
    std::vector<VectorField> out;
    for (const auto& g : generators)
        if (!g.superposition) out.push_back(g.field);
    return out;
}

namespace {

// Rows of sum_k c_k R_k = 0 after clearing the common denominator.
void append_rows(const std::vector<RatFun>& cols, SparseMatrix& m, std::vector<Expr>& denominators) {
    Poly lcd(Scalar(1));
    for (const auto& r : cols)
        if (!r.is_zero()) lcd = poly_lcm(lcd, r.den());
    if (!lcd.is_constant()) {
        Expr d = poly_to_expr(lcd);
        if (std::find(denominators.begin(), denominators.end(), d) == denominators.end()) denominators.push_back(d);
    }
    std::map<Monomial, SparseRow, MonoGreater> rows;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k].is_zero()) continue;
        Poly p = cols[k].num() * exact_divide(lcd, cols[k].den());
        for (const auto& [mono, c] : p.terms()) rows[mono][k] += c;
    }
    for (auto& [mono, row] : rows) m.add_row(std::move(row));
}

SymmetryBasis finish(const DiffSystem& sys, const Ansatz& ansatz, const std::vector<std::pair<std::size_t, Expr>>& terms,
                     const SparseMatrix& m, std::vector<Expr> denominators) {
    const JetSpace& sp = sys.space;
    SymmetryBasis out;
    out.ansatz = ansatz;
    out.unknowns = terms.size();
    out.rows = m.rows.size();
    out.denominators = std::move(denominators);
    std::vector<Vector> null = span_basis(nullspace(m), terms.size());
    std::vector<int> us;
    for (int a = 0; a < sp.q(); ++a) us.push_back(sp.u(a).sym().atom_id);
    for (const auto& c : null) {
        VectorField v = zero_field(sp);
        std::vector<std::vector<Expr>> parts(v.size());
        for (std::size_t k = 0; k < terms.size(); ++k)
            if (c[k] != 0) parts[terms[k].first].push_back(Expr(c[k]) * terms[k].second);
        for (std::size_t s = 0; s < parts.size(); ++s) {
            Expr e = normalize(Expr::sum(parts[s]));
            (s < v.xi.size() ? v.xi[s] : v.phi[s - v.xi.size()]) = e;
        }
        Generator g;
        g.field = v;
        bool xi_zero = std::all_of(v.xi.begin(), v.xi.end(), [](const Expr& e) { return e.is_zero(); });
        bool u_free = true;
        for (const auto& f : v.phi) {
            RatFun r = to_ratfun(f);
            for (int u : us)
                if (depends_on(r, u)) u_free = false;
        }
        g.superposition = xi_zero && u_free;
        CheckResult chk = symmetry_check(v, sys);
        if (chk.verdict == Verdict::Fail) throw InternalError("nullspace generator fails the symmetry check: " + render_field(v, sp));
        out.generators.push_back(std::move(g));
    }
    if (out.generators.empty()) {
        out.warnings.push_back("no symmetries within ansatz");
        return out;
    }
    std::vector<VectorField> all = out.fields();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < out.generators.size(); ++i)
        if (!out.generators[i].superposition) idx.push_back(i);
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            VectorField br = bracket(all[idx[a]], all[idx[b]], sp);
            if (is_zero(br)) continue;
            auto vecs = all;
            vecs.push_back(br);
            auto cv = coefficient_vectors(vecs);
            Vector target = cv.back();
            cv.pop_back();
            if (!span_coordinates(target, cv))
                out.warnings.push_back("bracket [g" + std::to_string(idx[a] + 1) + ", g" + std::to_string(idx[b] + 1) +
                                       "] leaves the computed span; the ansatz is probably truncated");
        }
    return out;
}

} // namespace

SymmetryBasis solve_symmetries(const DiffSystem& sys, const Ansatz& ansatz) {
    const JetSpace& sp = sys.space;
    auto terms = ansatz_terms(sp, ansatz);
    std::vector<std::vector<RatFun>> cols(sys.equations.size(), std::vector<RatFun>(terms.size()));
    for (std::size_t k = 0; k < terms.size(); ++k) {
        VectorField v = terms[k].second * unit_field(sp, terms[k].first);
        ProlongedField pr = prolong(v, sp.n, sp);
        for (std::size_t e = 0; e < sys.equations.size(); ++e)
            cols[e][k] = sys.on_shell(apply_prolonged(pr, sys.equations[e].expr, sp));
    }
    SparseMatrix m(terms.size());
    std::vector<Expr> dens;
    for (const auto& c : cols) append_rows(c, m, dens);
    return finish(sys, ansatz, terms, m, dens);
}

SymmetryBasis solve_determining_system(const DiffSystem& sys, const DeterminingSystem& ds, const Ansatz& ansatz) {
    const JetSpace& sp = sys.space;
    auto terms = ansatz_terms(sp, ansatz);
    std::vector<int> params = base_ids(sp);
    std::vector<RatFun> residuals;
    for (const auto& r : ds.residuals) residuals.push_back(to_ratfun(r));
    std::vector<std::vector<RatFun>> cols(residuals.size(), std::vector<RatFun>(terms.size()));
    for (std::size_t k = 0; k < terms.size(); ++k) {
        std::map<std::string, FunPattern> funs;
        RatFun t = to_ratfun(terms[k].second);
        for (std::size_t s = 0; s < ds.unknowns.size(); ++s)
            funs[ds.unknowns[s]] = FunPattern{params, s == terms[k].first ? t : RatFun()};
        for (std::size_t r = 0; r < residuals.size(); ++r) cols[r][k] = substitute(residuals[r], {}, funs);
    }
    SparseMatrix m(terms.size());
    std::vector<Expr> dens = ds.denominators;
    for (const auto& c : cols) append_rows(c, m, dens);
    return finish(sys, ansatz, terms, m, dens);
}

} // namespace liesym
