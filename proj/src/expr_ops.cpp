#include "liesym/expr_ops.hpp"

#include <atomic>

#include "liesym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <unordered_map>

namespace liesym {

Expr differentiate(const Expr& e, const Expr& s) {
    if (s.kind() != NodeKind::Symbol) throw ValidationError("differentiate: not a symbol: " + render(s));
    return to_expr(diff(to_ratfun(e), s.sym().atom_id));
}

Expr normalize(const Expr& e) { return to_expr(to_ratfun(e)); }

Expr substitute(const Expr& e, const Bindings& bindings) {
    std::unordered_map<int, RatFun> binds;
    std::map<std::string, FunPattern> funs;
    for (const auto& [key, value] : bindings) {
        if (key.kind() == NodeKind::Symbol) {
            if (free_symbols(value).count(&key.sym()))
                throw CyclicBinding("binding for " + key.name() + " mentions itself");
            binds[key.sym().atom_id] = to_ratfun(value);
            continue;
        }
        if (key.kind() != NodeKind::FuncSym) throw ValidationError("cannot bind " + render(key));
        if (contains_funcsym(value, key.name()))
            throw CyclicBinding("binding for " + key.name() + " mentions itself");
        bool pattern = std::all_of(key.index().begin(), key.index().end(), [](int i) { return i == 0; });
        std::set<const SymbolInfo*> seen;
        for (const auto& a : key.args()) {
            if (a.kind() != NodeKind::Symbol || !seen.insert(&a.sym()).second) pattern = false;
        }
        if (pattern) {
            FunPattern fp;
            for (const auto& a : key.args()) fp.params.push_back(a.sym().atom_id);
            fp.value = to_ratfun(value);
            funs[key.name()] = fp;
        } else {
            RatFun k = to_ratfun(key);
            binds[k.num().lead_mono().front().first] = to_ratfun(value);
        }
    }
    return to_expr(substitute(to_ratfun(e), binds, funs));
}

// ---------------------------------------------------------------- equality

std::vector<int> symbol_atoms(const RatFun& r) {
    std::vector<int> out;
    for (int id : r.atoms()) {
        const auto& s = atom(id).symbols;
        out.insert(out.end(), s.begin(), s.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

bool has_transcendental(const RatFun& r) {
    for (int id : r.atoms()) {
        const Atom& a = atom(id);
        if (a.kind == AtomKind::Kernel || a.kind == AtomKind::Radical) return true;
        for (const auto& arg : a.args)
            if (has_transcendental(arg)) return true;
    }
    return false;
}

double real_power(double v, const Scalar& e) {
    if (v == 0) {
        if (e < 0) throw DomainFault("division by zero");
        return 0;
    }
    if (is_integer(e)) return std::pow(v, e.get_d());
    if (v < 0) {
        if (mpz_even_p(e.get_den_mpz_t())) throw DomainFault("even root of a negative number");
        double m = std::pow(-v, e.get_d());
        return mpz_odd_p(e.get_num_mpz_t()) ? -m : m;
    }
    return std::pow(v, e.get_d());
}

double apply_kernel(KernelKind k, double v) {
    switch (k) {
    case KernelKind::Exp: return std::exp(v);
    case KernelKind::Ln:
        if (v <= 0) throw DomainFault("ln of a non-positive number");
        return std::log(v);
    case KernelKind::Sin: return std::sin(v);
    case KernelKind::Cos: return std::cos(v);
    case KernelKind::Arctan: return std::atan(v);
    }
    return 0;
}

double checked(double v) {
    if (!std::isfinite(v)) throw DomainFault("non-finite value");
    return v;
}

struct NumericEval {
    std::function<double(int)> symbol_value;
    std::function<double(const Atom&)> funcsym_value;
    std::unordered_map<int, double> cache;

    double rf(const RatFun& r) {
        auto f = [this](int id) { return atom_value(id); };
        double n = eval_poly_numeric(r.num(), f);
        if (r.den().is_one()) return checked(n);
        double d = eval_poly_numeric(r.den(), f);
        if (d == 0) throw DomainFault("division by zero");
        return checked(n / d);
    }

    double atom_value(int id) {
        auto it = cache.find(id);
        if (it != cache.end()) return it->second;
        const Atom& a = atom(id);
        double v = 0;
        switch (a.kind) {
        case AtomKind::Symbol: v = symbol_value(id); break;
        case AtomKind::FuncSym: v = funcsym_value(a); break;
        case AtomKind::Kernel: v = apply_kernel(a.kernel, rf(a.args[0])); break;
        case AtomKind::Radical: v = real_power(rf(a.args[0]), Scalar(1, a.q)); break;
        }
        v = checked(v);
        cache.emplace(id, v);
        return v;
    }
};

} // namespace

namespace {
std::atomic<std::uint64_t> g_probe_seed{42};
} // namespace

std::uint64_t probe_seed() { return g_probe_seed.load(); }
void set_probe_seed(std::uint64_t seed) { g_probe_seed.store(seed); }

EquivalenceResult zero_test(const RatFun& a, const RatFun& b, std::uint64_t seed) {
    RatFun d = a - b;
    if (d.is_zero()) return {true, EqualityBranch::Deterministic};
    if (!has_transcendental(d)) return {false, EqualityBranch::Deterministic};

    std::vector<int> syms = symbol_atoms(a);
    for (int s : symbol_atoms(b)) syms.push_back(s);
    std::sort(syms.begin(), syms.end(), [](int x, int y) { return compare_atoms(x, y) < 0; });
    syms.erase(std::unique(syms.begin(), syms.end()), syms.end());

    int agree = 0, disagree = 0, attempt = 0;
    while (agree + disagree < kProbePoints) {
        if (attempt > 16 * kProbePoints) throw Undecided("no admissible probe points found");
        std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(attempt++));
        std::unordered_map<int, double> vals;
        for (int s : syms) {
            std::uint64_t k = 1 + rng() % 97, den = 1 + rng() % 3;
            vals[s] = static_cast<double>(k) / static_cast<double>(den);
        }
        std::uint64_t fseed = rng();
        NumericEval ev;
        ev.symbol_value = [&](int id) { return vals.count(id) ? vals[id] : 1.0; };
        ev.funcsym_value = [&](const Atom& at) {
            std::mt19937_64 g(fseed ^ std::hash<std::string>{}(at.key));
            return 0.5 + static_cast<double>(g() % 2000) / 1000.0;
        };
        double va, vb;
        try {
            va = ev.rf(a);
            vb = ev.rf(b);
        } catch (const DomainFault&) {
            continue;
        }
        double scale = std::max({1.0, std::fabs(va), std::fabs(vb)});
        if (std::fabs(va - vb) <= kProbeTolerance * scale)
            ++agree;
        else
            ++disagree;
    }
    if (disagree == 0) return {true, EqualityBranch::Probabilistic};
    if (agree == 0) return {false, EqualityBranch::Probabilistic};
    throw Undecided("random probes disagree");
}

EquivalenceResult equivalence(const Expr& a, const Expr& b, std::uint64_t seed) {
    return zero_test(to_ratfun(a), to_ratfun(b), seed);
}

bool equivalent(const Expr& a, const Expr& b, std::uint64_t seed) { return equivalence(a, b, seed).equal; }

// ---------------------------------------------------------------- coefficients

Expr MonomialMap::reassemble() const {
    std::vector<Expr> terms;
    for (const auto& [exps, c] : this->terms) {
        std::vector<Expr> fs{c};
        for (std::size_t i = 0; i < exps.size(); ++i)
            if (exps[i]) fs.push_back(Expr::power(symbols[i], Scalar(exps[i])));
        terms.push_back(Expr::product(std::move(fs)));
    }
    return normalize(Expr::sum(std::move(terms)));
}

MonomialMap collect_coefficients(const Expr& e, const std::vector<Expr>& symbols) {
    MonomialMap out;
    out.symbols = symbols;
    std::vector<int> ids;
    for (const auto& s : symbols) {
        if (s.kind() != NodeKind::Symbol) throw ValidationError("collect_coefficients: not a symbol: " + render(s));
        ids.push_back(s.sym().atom_id);
    }
    RatFun r = to_ratfun(e);
    for (int id : ids)
        if (depends_on(RatFun(r.den()), id))
            throw NotPolynomial(atom(id).tree.name() + " occurs in a denominator");
    std::map<std::vector<int>, Poly> parts;
    for (const auto& [m, c] : r.num().terms()) {
        std::vector<int> exps(ids.size(), 0);
        Monomial rest;
        for (const auto& [id, k] : m) {
            auto pos = std::find(ids.begin(), ids.end(), id);
            if (pos != ids.end()) {
                exps[static_cast<std::size_t>(pos - ids.begin())] = k;
                continue;
            }
            for (int s : ids)
                if (atom_depends_on(id, s))
                    throw NotPolynomial(atom(s).tree.name() + " occurs inside " + render(atom(id).tree));
            rest.emplace_back(id, k);
        }
        parts[exps].add_term(rest, c);
    }
    for (auto& [exps, p] : parts) {
        if (p.is_zero()) continue;
        out.terms.emplace(exps, to_expr(RatFun(p, r.den())));
    }
    return out;
}

// ---------------------------------------------------------------- evaluation

namespace {

Scalar exact_kernel(KernelKind k, const Scalar& v) {
    switch (k) {
    case KernelKind::Exp:
        if (v == 0) return Scalar(1);
        break;
    case KernelKind::Ln:
        if (v == 1) return Scalar(0);
        break;
    case KernelKind::Sin:
        if (v == 0) return Scalar(0);
        break;
    case KernelKind::Cos:
        if (v == 0) return Scalar(1);
        break;
    case KernelKind::Arctan:
        if (v == 0) return Scalar(0);
        break;
    }
    throw InexactKernel(std::string(kernel_name(k)) + "(" + v.get_str() + ") has no exact rational value");
}

Scalar exact_power(const Scalar& v, const Scalar& e) {
    if (v == 0 && e < 0) throw DivisionByZero("division by zero");
    if (is_integer(e)) return liesym::pow(v, e.get_num().get_si());
    Scalar root;
    if (!exact_root(v, e.get_den().get_ui(), root))
        throw InexactKernel(v.get_str() + "^(" + e.get_str() + ") is not rational");
    return liesym::pow(root, e.get_num().get_si());
}

Scalar exact_tree(const Expr& e, const std::map<std::string, Scalar>& pt) {
    switch (e.kind()) {
    case NodeKind::Scalar: return e.scalar();
    case NodeKind::Symbol: {
        auto it = pt.find(e.name());
        if (it == pt.end()) throw UnboundSymbol("unbound symbol " + e.name());
        return it->second;
    }
    case NodeKind::FuncSym: throw UnboundSymbol("function " + render(e) + " has no value");
    case NodeKind::Kernel: return exact_kernel(e.kernel_kind(), exact_tree(e.base(), pt));
    case NodeKind::Power: return exact_power(exact_tree(e.base(), pt), e.scalar());
    case NodeKind::Product: {
        Scalar v(1);
        for (const auto& a : e.args()) v *= exact_tree(a, pt);
        return v;
    }
    case NodeKind::Sum: {
        Scalar v(0);
        for (const auto& a : e.args()) v += exact_tree(a, pt);
        return v;
    }
    }
    return Scalar(0);
}

double numeric_tree(const Expr& e, const std::map<std::string, double>& pt) {
    switch (e.kind()) {
    case NodeKind::Scalar: return e.scalar().get_d();
    case NodeKind::Symbol: {
        auto it = pt.find(e.name());
        if (it == pt.end()) throw UnboundSymbol("unbound symbol " + e.name());
        return it->second;
    }
    case NodeKind::FuncSym: throw UnboundSymbol("function " + render(e) + " has no value");
    case NodeKind::Kernel: return checked(apply_kernel(e.kernel_kind(), numeric_tree(e.base(), pt)));
    case NodeKind::Power: return checked(real_power(numeric_tree(e.base(), pt), e.scalar()));
    case NodeKind::Product: {
        double v = 1;
        for (const auto& a : e.args()) v *= numeric_tree(a, pt);
        return checked(v);
    }
    case NodeKind::Sum: {
        double v = 0;
        for (const auto& a : e.args()) v += numeric_tree(a, pt);
        return checked(v);
    }
    }
    return 0;
}

struct ExactEval {
    const std::map<std::string, Scalar>& pt;
    std::unordered_map<int, Scalar> cache;

    Scalar rf(const RatFun& r) {
        auto f = [this](int id) { return atom_value(id); };
        Scalar n = eval_poly_exact(r.num(), f);
        if (r.den().is_one()) return n;
        Scalar d = eval_poly_exact(r.den(), f);
        if (d == 0) throw DivisionByZero("denominator vanishes at the point");
        return n / d;
    }

    Scalar atom_value(int id) {
        auto it = cache.find(id);
        if (it != cache.end()) return it->second;
        const Atom& a = atom(id);
        Scalar v;
        switch (a.kind) {
        case AtomKind::Symbol: {
            auto p = pt.find(a.sym->name);
            if (p == pt.end()) throw UnboundSymbol("unbound symbol " + a.sym->name);
            v = p->second;
            break;
        }
        case AtomKind::FuncSym: throw UnboundSymbol("function " + render(a.tree) + " has no value");
        case AtomKind::Kernel: v = exact_kernel(a.kernel, rf(a.args[0])); break;
        case AtomKind::Radical: v = exact_power(rf(a.args[0]), Scalar(1, a.q)); break;
        }
        cache.emplace(id, v);
        return v;
    }
};

} // namespace

Scalar evaluate_exact(const Expr& e, const std::map<std::string, Scalar>& point) { return exact_tree(e, point); }

double evaluate_numeric(const Expr& e, const std::map<std::string, double>& point) {
    return numeric_tree(e, point);
}

Scalar evaluate_exact(const RatFun& r, const std::map<std::string, Scalar>& point) {
    ExactEval ev{point, {}};
    return ev.rf(r);
}

double evaluate_numeric(const RatFun& r, const std::map<std::string, double>& point) {
    NumericEval ev;
    ev.symbol_value = [&](int id) {
        const Atom& a = atom(id);
        auto it = point.find(a.sym->name);
        if (it == point.end()) throw UnboundSymbol("unbound symbol " + a.sym->name);
        return it->second;
    };
    ev.funcsym_value = [](const Atom& a) -> double { throw UnboundSymbol("function " + render(a.tree) + " has no value"); };
    return ev.rf(r);
}

} // namespace liesym
