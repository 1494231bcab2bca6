#include "liesym/ratfun.hpp"

#include "liesym/errors.hpp"

#include <algorithm>
#include <deque>
#include <shared_mutex>
#include <unordered_map>

namespace liesym {

Expr symbol_expr(const SymbolInfo* s);  // expr.cpp

// ---------------------------------------------------------------- monomials

int compare_monomials(const Monomial& a, const Monomial& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].first != b[i].first) return a[i].first < b[i].first ? 1 : -1;
        if (a[i].second != b[i].second) return a[i].second > b[i].second ? 1 : -1;
    }
    if (a.size() != b.size()) return a.size() > b.size() ? 1 : -1;
    return 0;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return out;
}

int mono_degree(const Monomial& m, int atom_id) {
    for (const auto& [a, e] : m)
        if (a == atom_id) return e;
    return 0;
}

namespace {

// a / b when every exponent of b is covered by a
bool mono_div(const Monomial& a, const Monomial& b, Monomial& out) {
    out.clear();
    std::size_t j = 0;
    for (const auto& [id, e] : a) {
        if (j < b.size() && b[j].first < id) return false;
        if (j < b.size() && b[j].first == id) {
            if (b[j].second > e) return false;
            if (e > b[j].second) out.emplace_back(id, e - b[j].second);
            ++j;
        } else {
            out.emplace_back(id, e);
        }
    }
    return j == b.size();
}

Monomial mono_gcd(const Monomial& a, const Monomial& b) {
    Monomial out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first)
            ++i;
        else if (b[j].first < a[i].first)
            ++j;
        else {
            out.emplace_back(a[i].first, std::min(a[i].second, b[j].second));
            ++i;
            ++j;
        }
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------- polynomials

Poly::Poly(const Scalar& c) {
    if (c != 0) terms_.emplace(Monomial{}, c);
}

Poly Poly::atom(int id, int e) {
    Poly p;
    if (e == 0)
        p.terms_.emplace(Monomial{}, Scalar(1));
    else
        p.terms_.emplace(Monomial{{id, e}}, Scalar(1));
    return p;
}

Poly Poly::term(const Monomial& m, const Scalar& c) {
    Poly p;
    if (c != 0) p.terms_.emplace(m, c);
    return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }
bool Poly::is_one() const { return terms_.size() == 1 && terms_.begin()->first.empty() && terms_.begin()->second == 1; }
Scalar Poly::constant_value() const {
    if (terms_.empty()) return Scalar(0);
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Scalar(0) : it->second;
}

void Poly::add_term(const Monomial& m, const Scalar& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Poly& Poly::operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    r += o;
    return r;
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
    return r;
}

Poly Poly::operator*(const Scalar& c) const {
    if (c == 0) return Poly();
    Poly r = *this;
    for (auto& [m, v] : r.terms_) v *= c;
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    if (is_zero() || o.is_zero()) return Poly();
    if (o.is_constant()) return *this * o.constant_value();
    if (is_constant()) return o * constant_value();
    Poly r;
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : o.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
    return r;
}

Poly Poly::pow(int e) const {
    if (e < 0) throw InternalError("negative polynomial power");
    Poly result(Scalar(1)), base = *this;
    while (e) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

std::vector<int> Poly::atoms() const {
    std::vector<int> out;
    for (const auto& [m, c] : terms_)
        for (const auto& [a, e] : m) out.push_back(a);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int Poly::degree_in(int atom_id) const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, mono_degree(m, atom_id));
    return d;
}

int Poly::total_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
        int s = 0;
        for (const auto& [a, e] : m) s += e;
        d = std::max(d, s);
    }
    return d;
}

bool try_divide(const Poly& a, const Poly& b, Poly& q) {
    if (b.is_zero()) throw DivisionByZero("polynomial division by zero");
    q = Poly();
    if (b.is_constant()) {
        q = a * (Scalar(1) / b.constant_value());
        return true;
    }
    Poly r = a;
    const Monomial& lb = b.lead_mono();
    const Scalar& cb = b.lead_coeff();
    Monomial t;
    while (!r.is_zero()) {
        if (!mono_div(r.lead_mono(), lb, t)) return false;
        Scalar c = r.lead_coeff() / cb;
        Poly step = Poly::term(t, c);
        q += step;
        r = r - step * b;
    }
    return true;
}

Poly exact_divide(const Poly& a, const Poly& b) {
    Poly q;
    if (!try_divide(a, b, q)) throw InternalError("inexact polynomial division");
    return q;
}

Poly monic(const Poly& p) {
    if (p.is_zero()) return p;
    return p * (Scalar(1) / p.lead_coeff());
}

namespace {

// coefficients of p viewed as a polynomial in v, where v is the smallest atom
// id occurring in p, so it always sits first in a monomial
std::map<int, Poly> coeffs_in(const Poly& p, int v) {
    std::map<int, Poly> out;
    for (const auto& [m, c] : p.terms()) {
        if (!m.empty() && m.front().first == v) {
            Monomial rest(m.begin() + 1, m.end());
            out[m.front().second].add_term(rest, c);
        } else {
            out[0].add_term(m, c);
        }
    }
    return out;
}

Poly content_in(const Poly& p, int v) {
    auto cs = coeffs_in(p, v);
    Poly g;
    for (auto it = cs.rbegin(); it != cs.rend(); ++it) {
        g = poly_gcd(g, it->second);
        if (g.is_constant()) return Poly(Scalar(1));
    }
    return g;
}

Poly shift(const Poly& p, int v, int k) {
    if (k == 0) return p;
    return p * Poly::atom(v, k);
}

Poly prem(const Poly& a, const Poly& b, int v) {
    auto cb = coeffs_in(b, v);
    int db = cb.rbegin()->first;
    Poly lb = cb.rbegin()->second;
    Poly r = a;
    while (!r.is_zero()) {
        int dr = r.degree_in(v);
        if (dr < db) break;
        auto cr = coeffs_in(r, v);
        Poly lr = cr.rbegin()->second;
        r = r * lb - shift(lr * b, v, dr - db);
        if (!r.is_zero()) {
            // keep the size down; only the primitive part matters for the gcd
            auto rc = r.lead_coeff();
            r = r * (Scalar(1) / rc);
        }
    }
    return r;
}

Poly primitive_in(const Poly& p, int v) {
    Poly c = content_in(p, v);
    if (c.is_constant()) return monic(p);
    return monic(exact_divide(p, c));
}

Poly gcd_general(const Poly& a, const Poly& b) {
    std::vector<int> aa = a.atoms(), ba = b.atoms();
    int v = std::min(aa.front(), ba.front());
    bool ina = aa.front() == v, inb = ba.front() == v;
    if (!ina) return poly_gcd(a, content_in(b, v));
    if (!inb) return poly_gcd(content_in(a, v), b);
    Poly ca = content_in(a, v), cb = content_in(b, v);
    Poly c = poly_gcd(ca, cb);
    Poly pa = ca.is_constant() ? a : exact_divide(a, ca);
    Poly pb = cb.is_constant() ? b : exact_divide(b, cb);
    if (pa.degree_in(v) < pb.degree_in(v)) std::swap(pa, pb);
    Poly g;
    while (true) {
        Poly r = prem(pa, pb, v);
        if (r.is_zero()) {
            g = primitive_in(pb, v);
            break;
        }
        if (r.degree_in(v) == 0) {
            g = Poly(Scalar(1));
            break;
        }
        pa = pb;
        pb = primitive_in(r, v);
    }
    return monic(c * g);
}

} // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return monic(b);
    if (b.is_zero()) return monic(a);
    if (a.is_constant() || b.is_constant()) return Poly(Scalar(1));
    if (a.is_monomial() || b.is_monomial()) {
        const Poly& m = a.is_monomial() ? a : b;
        const Poly& o = a.is_monomial() ? b : a;
        Monomial g = m.lead_mono();
        for (const auto& [mm, c] : o.terms()) {
            g = mono_gcd(g, mm);
            if (g.empty()) break;
        }
        return Poly::term(g, Scalar(1));
    }
    if (a == b) return monic(a);
    // strip the common monomial factor first; cheap and frequent
    Monomial ga = a.lead_mono(), gb = b.lead_mono();
    for (const auto& [m, c] : a.terms()) ga = mono_gcd(ga, m);
    for (const auto& [m, c] : b.terms()) gb = mono_gcd(gb, m);
    if (!ga.empty() || !gb.empty()) {
        Poly qa = exact_divide(a, Poly::term(ga, Scalar(1)));
        Poly qb = exact_divide(b, Poly::term(gb, Scalar(1)));
        Poly mg = Poly::term(mono_gcd(ga, gb), Scalar(1));
        return monic(mg * poly_gcd(qa, qb));
    }
    Poly q;
    if (a.size() <= b.size() && try_divide(b, a, q)) return monic(a);
    if (b.size() <= a.size() && try_divide(a, b, q)) return monic(b);
    return gcd_general(a, b);
}

// ---------------------------------------------------------------- atoms

namespace {

struct AtomTable {
    std::shared_mutex mu;
    std::deque<Atom> atoms;
    std::unordered_map<std::string, int> by_key;
};

AtomTable& table() {
    static AtomTable t;
    return t;
}

int intern_atom(Atom a) {
    auto& t = table();
    {
        std::shared_lock<std::shared_mutex> lock(t.mu);
        auto it = t.by_key.find(a.key);
        if (it != t.by_key.end()) return it->second;
    }
    std::unique_lock<std::shared_mutex> lock(t.mu);
    auto it = t.by_key.find(a.key);
    if (it != t.by_key.end()) return it->second;
    a.id = static_cast<int>(t.atoms.size());
    t.by_key.emplace(a.key, a.id);
    t.atoms.push_back(std::move(a));
    return t.atoms.back().id;
}

void merge_symbols(std::vector<int>& into, const RatFun& r) {
    for (int id : r.atoms()) {
        const Atom& a = atom(id);
        if (a.kind == AtomKind::Symbol)
            into.push_back(id);
        else
            into.insert(into.end(), a.symbols.begin(), a.symbols.end());
    }
}

void finish_symbols(Atom& a) {
    std::sort(a.symbols.begin(), a.symbols.end());
    a.symbols.erase(std::unique(a.symbols.begin(), a.symbols.end()), a.symbols.end());
    int o = 0;
    for (int s : a.symbols) o = std::max(o, atom(s).jet_order);
    a.jet_order = o;
}

int radical_atom(const Poly& base, int q) {
    Atom a;
    a.kind = AtomKind::Radical;
    a.args = {RatFun(base)};
    a.q = q;
    a.tree = Expr::power(poly_to_expr(base), Scalar(1, q));
    a.key = "r:" + std::to_string(q) + ":" + render(poly_to_expr(base));
    merge_symbols(a.symbols, a.args[0]);
    finish_symbols(a);
    return intern_atom(std::move(a));
}

} // namespace

int register_symbol_atom(const SymbolInfo* s) {
    Atom a;
    a.kind = AtomKind::Symbol;
    a.sym = s;
    a.key = "s:" + s->name + "#" + std::to_string(reinterpret_cast<std::uintptr_t>(s));
    a.tree = symbol_expr(s);
    a.jet_order = s->order();
    auto& t = table();
    std::unique_lock<std::shared_mutex> lock(t.mu);
    a.id = static_cast<int>(t.atoms.size());
    a.symbols = {a.id};
    t.by_key.emplace(a.key, a.id);
    t.atoms.push_back(std::move(a));
    return t.atoms.back().id;
}

const Atom& atom(int id) {
    auto& t = table();
    std::shared_lock<std::shared_mutex> lock(t.mu);
    return t.atoms[static_cast<std::size_t>(id)];
}

int symbol_atom(const SymbolInfo* s) { return s->atom_id; }

int compare_atoms(int a, int b) {
    if (a == b) return 0;
    return compare(atom(a).tree, atom(b).tree);
}

RatFun RatFun::from_atom(int id) {
    RatFun r;
    r.num_ = Poly::atom(id);
    return r;
}

RatFun make_kernel(KernelKind k, const RatFun& arg) {
    if (arg.is_zero()) {
        if (k == KernelKind::Exp || k == KernelKind::Cos) return RatFun(Scalar(1));
        if (k == KernelKind::Sin || k == KernelKind::Arctan) return RatFun(Scalar(0));
    }
    if (k == KernelKind::Ln) {
        if (arg.is_constant() && arg.constant_value() == 1) return RatFun(Scalar(0));
        if (arg.den().is_one() && arg.num().is_monomial() && arg.num().lead_coeff() == 1) {
            const Monomial& m = arg.num().lead_mono();
            if (m.size() == 1 && m[0].second == 1) {
                const Atom& a = atom(m[0].first);
                if (a.kind == AtomKind::Kernel && a.kernel == KernelKind::Exp) return a.args[0];
            }
        }
    }
    Atom a;
    a.kind = AtomKind::Kernel;
    a.kernel = k;
    a.args = {arg};
    a.tree = Expr::kernel(k, to_expr(arg));
    a.key = "k:" + render(a.tree);
    merge_symbols(a.symbols, arg);
    finish_symbols(a);
    return RatFun::from_atom(intern_atom(std::move(a)));
}

RatFun make_funcsym(const std::string& name, const std::vector<RatFun>& args, const std::vector<int>& index) {
    Atom a;
    a.kind = AtomKind::FuncSym;
    a.name = name;
    a.index = index.empty() ? std::vector<int>(args.size(), 0) : index;
    a.args = args;
    std::vector<Expr> trees;
    for (const auto& r : args) trees.push_back(to_expr(r));
    a.tree = Expr::funcsym(name, trees, a.index);
    a.key = "f:" + render(a.tree);
    for (const auto& r : args) merge_symbols(a.symbols, r);
    finish_symbols(a);
    return RatFun::from_atom(intern_atom(std::move(a)));
}

// ---------------------------------------------------------------- rational functions

namespace {

bool is_special(int id) {
    const Atom& a = atom(id);
    return a.kind == AtomKind::Radical || (a.kind == AtomKind::Kernel && a.kernel == KernelKind::Exp);
}

bool poly_has_special(const Poly& p) {
    for (const auto& [m, c] : p.terms())
        for (const auto& [id, e] : m)
            if (is_special(id)) return true;
    return false;
}

// Merge exp factors and reduce radical powers inside every monomial.
Poly rewrite_specials(const Poly& p, bool& changed) {
    Poly out;
    for (const auto& [m, c] : p.terms()) {
        int nexp = 0;
        bool need = false;
        for (const auto& [id, e] : m) {
            const Atom& a = atom(id);
            if (a.kind == AtomKind::Kernel && a.kernel == KernelKind::Exp) {
                nexp++;
                if (e > 1) need = true;
            } else if (a.kind == AtomKind::Radical && e >= a.q) {
                need = true;
            }
        }
        if (nexp > 1) need = true;
        if (!need) {
            out.add_term(m, c);
            continue;
        }
        changed = true;
        Monomial plain;
        RatFun exparg;
        Poly factor(c);
        for (const auto& [id, e] : m) {
            const Atom& a = atom(id);
            if (a.kind == AtomKind::Kernel && a.kernel == KernelKind::Exp) {
                exparg += a.args[0] * RatFun(Scalar(e));
            } else if (a.kind == AtomKind::Radical && e >= a.q) {
                int whole = e / a.q, rest = e % a.q;
                factor = factor * a.args[0].num().pow(whole);
                if (rest) plain.emplace_back(id, rest);
            } else {
                plain.emplace_back(id, e);
            }
        }
        factor = factor * Poly::term(plain, Scalar(1));
        if (nexp) {
            RatFun ex = make_kernel(KernelKind::Exp, exparg);
            factor = factor * ex.num();
        }
        out += factor;
    }
    return out;
}

Monomial special_content(const Poly& p) {
    Monomial g;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        Monomial s;
        for (const auto& pr : m)
            if (is_special(pr.first)) s.push_back(pr);
        if (first)
            g = s;
        else
            g = mono_gcd(g, s);
        first = false;
        if (g.empty()) break;
    }
    return g;
}

} // namespace

RatFun::RatFun(const Poly& n, const Poly& d) : num_(n), den_(d) {
    if (den_.is_zero()) throw DivisionByZero("rational function with zero denominator");
    fixup();
}

void RatFun::reduce() {
    if (num_.is_zero()) {
        den_ = Poly(Scalar(1));
        return;
    }
    if (den_.is_constant()) {
        if (!den_.is_one()) {
            num_ = num_ * (Scalar(1) / den_.constant_value());
            den_ = Poly(Scalar(1));
        }
        return;
    }
    Poly g = poly_gcd(num_, den_);
    if (!g.is_constant()) {
        num_ = exact_divide(num_, g);
        den_ = exact_divide(den_, g);
    }
    Scalar lc = den_.lead_coeff();
    if (lc != 1) {
        num_ = num_ * (Scalar(1) / lc);
        den_ = den_ * (Scalar(1) / lc);
    }
}

void RatFun::fixup() {
    for (int round = 0; round < 16; ++round) {
        bool sn = poly_has_special(num_), sd = poly_has_special(den_);
        if (!sn && !sd) break;
        bool changed = false;
        if (sn) num_ = rewrite_specials(num_, changed);
        if (sd) den_ = rewrite_specials(den_, changed);
        if (sd && !den_.is_zero()) {
            Monomial g = special_content(den_);
            if (!g.empty()) {
                changed = true;
                den_ = exact_divide(den_, Poly::term(g, Scalar(1)));
                for (const auto& [id, e] : g) {
                    const Atom& a = atom(id);
                    if (a.kind == AtomKind::Kernel) {
                        RatFun inv = make_kernel(KernelKind::Exp, a.args[0] * RatFun(Scalar(-e)));
                        num_ = num_ * inv.num();
                    } else {
                        num_ = num_ * Poly::atom(id, a.q - e);
                        den_ = den_ * a.args[0].num();
                    }
                }
            }
        }
        if (den_.is_zero()) throw DivisionByZero("denominator vanished");
        if (!changed) break;
    }
    reduce();
}

Scalar RatFun::constant_value() const {
    if (!is_constant()) throw InternalError("not a constant");
    return num_.constant_value() / den_.constant_value();
}

RatFun RatFun::operator+(const RatFun& o) const {
    if (o.is_zero()) return *this;
    if (is_zero()) return o;
    if (den_.is_one() && o.den_.is_one()) {
        RatFun r;
        r.num_ = num_ + o.num_;
        return r;
    }
    if (den_ == o.den_) return RatFun(num_ + o.num_, den_);
    Poly g = poly_gcd(den_, o.den_);
    Poly da = exact_divide(den_, g), db = exact_divide(o.den_, g);
    return RatFun(num_ * db + o.num_ * da, da * o.den_);
}

RatFun RatFun::operator-() const {
    RatFun r = *this;
    r.num_ = -r.num_;
    return r;
}

RatFun RatFun::operator-(const RatFun& o) const { return *this + (-o); }

RatFun RatFun::operator*(const RatFun& o) const {
    if (is_zero() || o.is_zero()) return RatFun();
    if (o.is_constant()) {
        RatFun r = *this;
        r.num_ = r.num_ * o.constant_value();
        return r;
    }
    if (is_constant()) return o * *this;
    if (den_.is_one() && o.den_.is_one()) return RatFun(num_ * o.num_);
    Poly g1 = poly_gcd(num_, o.den_), g2 = poly_gcd(o.num_, den_);
    Poly n1 = g1.is_one() ? num_ : exact_divide(num_, g1);
    Poly d2 = g1.is_one() ? o.den_ : exact_divide(o.den_, g1);
    Poly n2 = g2.is_one() ? o.num_ : exact_divide(o.num_, g2);
    Poly d1 = g2.is_one() ? den_ : exact_divide(den_, g2);
    return RatFun(n1 * n2, d1 * d2);
}

RatFun RatFun::operator/(const RatFun& o) const {
    if (o.is_zero()) throw DivisionByZero("division by zero");
    RatFun inv;
    inv.num_ = o.den_;
    inv.den_ = o.num_;
    if (o.num_.is_constant()) {
        inv.num_ = o.den_ * (Scalar(1) / o.num_.constant_value());
        inv.den_ = Poly(Scalar(1));
    } else {
        Scalar lc = inv.den_.lead_coeff();
        inv.num_ = inv.num_ * (Scalar(1) / lc);
        inv.den_ = inv.den_ * (Scalar(1) / lc);
        if (poly_has_special(inv.den_)) inv.fixup();
    }
    return *this * inv;
}

RatFun RatFun::pow(int e) const {
    if (e == 0) return RatFun(Scalar(1));
    if (e < 0) return RatFun(Scalar(1)) / pow(-e);
    RatFun result(Scalar(1)), base = *this;
    while (e) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

namespace {

RatFun poly_power(const Poly& p, const Scalar& e);

// prim^e = prim^m * (prim^(1/q))^k with 0 <= k < q
RatFun radical_raw(const Poly& prim, const Scalar& e) {
    int q = static_cast<int>(e.get_den().get_si());
    Integer m;
    mpz_fdiv_q(m.get_mpz_t(), e.get_num_mpz_t(), e.get_den_mpz_t());
    Scalar frac = e - Scalar(m);
    int k = static_cast<int>(Scalar(frac * q).get_num().get_si());
    int r = radical_atom(prim, q);
    return RatFun(prim).pow(static_cast<int>(m.get_si())) * RatFun::from_atom(r).pow(k);
}

// a^f for a single atom
RatFun atom_power(int id, const Scalar& f) {
    if (is_integer(f)) return RatFun::from_atom(id).pow(static_cast<int>(f.get_num().get_si()));
    const Atom& a = atom(id);
    if (a.kind == AtomKind::Radical) return poly_power(a.args[0].num(), f / a.q);
    if (a.kind == AtomKind::Kernel && a.kernel == KernelKind::Exp)
        return make_kernel(KernelKind::Exp, a.args[0] * RatFun(f));
    return radical_raw(Poly::atom(id), f);
}

RatFun poly_power(const Poly& p, const Scalar& e) {
    if (is_integer(e)) return RatFun(p).pow(static_cast<int>(e.get_num().get_si()));
    if (p.is_zero()) {
        if (e < 0) throw DivisionByZero("0 raised to a negative power");
        return RatFun();
    }
    if (p.is_monomial()) {
        RatFun out(Scalar(1));
        Scalar c = p.lead_coeff();
        if (c != 1) out = make_radical_power(Poly(c), e);
        for (const auto& [id, k] : p.lead_mono()) out = out * atom_power(id, e * k);
        return out;
    }
    return make_radical_power(p, e);
}

} // namespace

RatFun make_radical_power(const Poly& base, const Scalar& e) {
    if (is_integer(e)) return RatFun(base).pow(static_cast<int>(e.get_num().get_si()));
    if (base.is_constant()) {
        Scalar c = base.constant_value();
        if (c == 0) {
            if (e < 0) throw DivisionByZero("0 raised to a negative power");
            return RatFun();
        }
        unsigned long q = e.get_den().get_ui();
        Scalar root;
        if (exact_root(c, q, root)) return RatFun(liesym::pow(root, e.get_num().get_si()));
        return radical_raw(base, e);
    }
    if (base.is_monomial()) return poly_power(base, e);
    // positive rational content comes out separately: base = c * prim
    Integer lcm_den(1), gcd_num(0);
    for (const auto& [m, c] : base.terms()) {
        mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den_mpz_t());
        mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), c.get_num_mpz_t());
    }
    Scalar content(gcd_num, lcm_den);
    content.canonicalize();
    Poly prim = base * (Scalar(1) / content);
    RatFun out = radical_raw(prim, e);
    if (content != 1) out = out * make_radical_power(Poly(content), e);
    return out;
}

RatFun RatFun::pow(const Scalar& e) const {
    if (is_integer(e)) return pow(static_cast<int>(e.get_num().get_si()));
    if (is_zero()) {
        if (e < 0) throw DivisionByZero("0 raised to a negative power");
        return RatFun();
    }
    return poly_power(num_, e) * poly_power(den_, -e);
}

std::vector<int> RatFun::atoms() const {
    std::vector<int> a = num_.atoms(), b = den_.atoms();
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

bool RatFun::has_special_atoms() const { return poly_has_special(num_) || poly_has_special(den_); }

// ---------------------------------------------------------------- conversions

RatFun to_ratfun(const Expr& e) {
    const Node* n = e.node();
    std::call_once(n->rf_once, [&] {
        RatFun r;
        switch (e.kind()) {
        case NodeKind::Scalar: r = RatFun(e.scalar()); break;
        case NodeKind::Symbol: r = RatFun::from_atom(e.sym().atom_id); break;
        case NodeKind::FuncSym: {
            std::vector<RatFun> args;
            for (const auto& a : e.args()) args.push_back(to_ratfun(a));
            r = make_funcsym(e.name(), args, e.index());
            break;
        }
        case NodeKind::Kernel: r = make_kernel(e.kernel_kind(), to_ratfun(e.base())); break;
        case NodeKind::Power: r = to_ratfun(e.base()).pow(e.scalar()); break;
        case NodeKind::Product: {
            r = RatFun(Scalar(1));
            for (const auto& a : e.args()) r = r * to_ratfun(a);
            break;
        }
        case NodeKind::Sum: {
            Poly poly_part;
            for (const auto& a : e.args()) {
                RatFun t = to_ratfun(a);
                if (t.den().is_one())
                    poly_part += t.num();
                else
                    r = r + t;
            }
            r = r + RatFun(poly_part);
            break;
        }
        }
        n->rf = std::make_shared<const RatFun>(std::move(r));
    });
    return *n->rf;
}

Expr poly_to_expr(const Poly& p) {
    std::vector<Expr> terms;
    for (const auto& [m, c] : p.terms()) {
        std::vector<Expr> fs{Expr(c)};
        for (const auto& [id, e] : m) {
            const Atom& a = atom(id);
            fs.push_back(e == 1 ? a.tree : Expr::power(a.tree, Scalar(e)));
        }
        terms.push_back(Expr::product(std::move(fs)));
    }
    return Expr::sum(std::move(terms));
}

namespace {

Scalar first_coefficient(const Expr& e) {
    const Expr& t = e.kind() == NodeKind::Sum ? e.args().front() : e;
    if (t.is_scalar()) return t.scalar();
    if (t.kind() == NodeKind::Product && t.args().front().is_scalar()) return t.args().front().scalar();
    return Scalar(1);
}

} // namespace

Expr to_expr(const RatFun& r) {
    Expr out;
    if (r.den().is_one()) {
        out = poly_to_expr(r.num());
    } else {
        Integer lcm_den(1), gcd_num(0);
        for (const auto& [m, c] : r.den().terms()) {
            mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den_mpz_t());
            mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), c.get_num_mpz_t());
        }
        Scalar f(lcm_den, gcd_num);
        f.canonicalize();
        Expr dtree = poly_to_expr(r.den() * f);
        if (first_coefficient(dtree) < 0) {
            f = -f;
            dtree = poly_to_expr(r.den() * f);
        }
        Expr ntree = poly_to_expr(r.num() * f);
        out = Expr::product({ntree, Expr::power(dtree, Scalar(-1))});
    }
    std::call_once(out.node()->rf_once, [&] { out.node()->rf = std::make_shared<const RatFun>(r); });
    return out;
}

// ---------------------------------------------------------------- calculus

bool atom_depends_on(int atom_id, int sym_atom) {
    const auto& s = atom(atom_id).symbols;
    return std::binary_search(s.begin(), s.end(), sym_atom);
}

bool depends_on(const RatFun& r, int sym_atom) {
    for (int id : r.atoms())
        if (atom_depends_on(id, sym_atom)) return true;
    return false;
}

namespace {

struct DiffCache {
    std::mutex mu;
    std::map<std::pair<int, int>, RatFun> table;
};

DiffCache& diff_cache() {
    static DiffCache c;
    return c;
}

RatFun compute_diff_atom(int id, int s) {
    const Atom& a = atom(id);
    switch (a.kind) {
    case AtomKind::Symbol: return RatFun(Scalar(id == s ? 1 : 0));
    case AtomKind::Kernel: {
        const RatFun& arg = a.args[0];
        RatFun da = diff(arg, s);
        if (da.is_zero()) return RatFun();
        switch (a.kernel) {
        case KernelKind::Exp: return RatFun::from_atom(id) * da;
        case KernelKind::Ln: return da / arg;
        case KernelKind::Sin: return make_kernel(KernelKind::Cos, arg) * da;
        case KernelKind::Cos: return -(make_kernel(KernelKind::Sin, arg) * da);
        case KernelKind::Arctan: return da / (RatFun(Scalar(1)) + arg * arg);
        }
        break;
    }
    case AtomKind::FuncSym: {
        RatFun out;
        for (std::size_t j = 0; j < a.args.size(); ++j) {
            RatFun dj = diff(a.args[j], s);
            if (dj.is_zero()) continue;
            std::vector<int> idx = a.index;
            idx[j]++;
            out += make_funcsym(a.name, a.args, idx) * dj;
        }
        return out;
    }
    case AtomKind::Radical: {
        const RatFun& b = a.args[0];
        RatFun db = diff(b, s);
        if (db.is_zero()) return RatFun();
        return RatFun::from_atom(id) * db / (b * RatFun(Scalar(a.q)));
    }
    }
    return RatFun();
}

} // namespace

RatFun diff_atom(int id, int s) {
    if (!atom_depends_on(id, s)) return RatFun();
    auto& c = diff_cache();
    {
        std::lock_guard<std::mutex> lock(c.mu);
        auto it = c.table.find({id, s});
        if (it != c.table.end()) return it->second;
    }
    RatFun d = compute_diff_atom(id, s);
    std::lock_guard<std::mutex> lock(c.mu);
    c.table.emplace(std::make_pair(id, s), d);
    return d;
}

Poly poly_partial(const Poly& p, int a) {
    Poly out;
    for (const auto& [m, c] : p.terms()) {
        int e = mono_degree(m, a);
        if (!e) continue;
        Monomial mm;
        for (const auto& pr : m) {
            if (pr.first != a)
                mm.push_back(pr);
            else if (e > 1)
                mm.emplace_back(a, e - 1);
        }
        out.add_term(mm, c * e);
    }
    return out;
}

RatFun diff_poly(const Poly& p, int s) {
    RatFun out;
    Poly plain;
    for (int a : p.atoms()) {
        if (!atom_depends_on(a, s)) continue;
        Poly pa = poly_partial(p, a);
        if (a == s) {
            plain += pa;
            continue;
        }
        RatFun da = diff_atom(a, s);
        if (da.is_zero()) continue;
        if (da.den().is_one() && !poly_has_special(da.num()) && !poly_has_special(pa))
            plain += pa * da.num();
        else
            out += RatFun(pa) * da;
    }
    return out + RatFun(plain);
}

RatFun diff(const RatFun& r, int s) {
    if (r.den().is_constant()) {
        RatFun d = diff_poly(r.num(), s);
        return r.den().is_one() ? d : d / RatFun(r.den());
    }
    RatFun dn = diff_poly(r.num(), s), dd = diff_poly(r.den(), s);
    if (dd.is_zero()) return dn / RatFun(r.den());
    RatFun den(r.den());
    return (dn * den - RatFun(r.num()) * dd) / (den * den);
}

// ---------------------------------------------------------------- substitution

RatFun substitute(const RatFun& r, const std::unordered_map<int, RatFun>& binds,
                  const std::map<std::string, FunPattern>& funs) {
    if (binds.empty() && funs.empty()) return r;
    std::unordered_map<int, RatFun> repl;
    bool any = false;
    for (int id : r.atoms()) {
        auto it = binds.find(id);
        if (it != binds.end()) {
            repl.emplace(id, it->second);
            any = true;
            continue;
        }
        const Atom& a = atom(id);
        if (a.kind == AtomKind::Symbol) continue;
        bool touched = false;
        if (a.kind == AtomKind::FuncSym && funs.count(a.name)) touched = true;
        for (int s : a.symbols)
            if (binds.count(s)) touched = true;
        if (!touched && !funs.empty()) {
            // funcsyms nested in arguments
            for (const auto& arg : a.args)
                for (int sub : arg.atoms())
                    if (atom(sub).kind != AtomKind::Symbol) touched = true;
        }
        if (!touched) continue;
        std::vector<RatFun> nargs;
        bool changed = false;
        for (const auto& arg : a.args) {
            nargs.push_back(substitute(arg, binds, funs));
            if (nargs.back() != arg) changed = true;
        }
        RatFun v;
        if (a.kind == AtomKind::FuncSym && funs.count(a.name)) {
            const FunPattern& pat = funs.at(a.name);
            if (pat.params.size() != a.args.size()) throw ValidationError("function arity mismatch for " + a.name);
            RatFun d = pat.value;
            for (std::size_t j = 0; j < a.index.size(); ++j)
                for (int k = 0; k < a.index[j]; ++k) d = diff(d, pat.params[j]);
            std::unordered_map<int, RatFun> pb;
            for (std::size_t j = 0; j < pat.params.size(); ++j) pb.emplace(pat.params[j], nargs[j]);
            v = substitute(d, pb);
        } else if (!changed) {
            continue;
        } else if (a.kind == AtomKind::Kernel) {
            v = make_kernel(a.kernel, nargs[0]);
        } else if (a.kind == AtomKind::FuncSym) {
            v = make_funcsym(a.name, nargs, a.index);
        } else {
            v = nargs[0].pow(Scalar(1, a.q));
        }
        repl.emplace(id, v);
        any = true;
    }
    if (!any) return r;
    auto eval = [&](const Poly& p) {
        RatFun out;
        Poly untouched;
        std::map<std::pair<int, int>, RatFun> powers;
        for (const auto& [m, c] : p.terms()) {
            Monomial keep;
            RatFun factor(c);
            bool replaced = false;
            for (const auto& [id, e] : m) {
                auto it = repl.find(id);
                if (it == repl.end()) {
                    keep.emplace_back(id, e);
                    continue;
                }
                replaced = true;
                auto pk = powers.find({id, e});
                if (pk == powers.end()) pk = powers.emplace(std::make_pair(id, e), it->second.pow(e)).first;
                factor = factor * pk->second;
                if (factor.is_zero()) break;
            }
            if (!replaced) {
                untouched.add_term(keep, c);
                continue;
            }
            if (factor.is_zero()) continue;
            out += factor * RatFun(Poly::term(keep, Scalar(1)));
        }
        return out + RatFun(untouched);
    };
    RatFun n = eval(r.num());
    if (r.den().is_one()) return n;
    return n / eval(r.den());
}

// ---------------------------------------------------------------- evaluation

Scalar eval_poly_exact(const Poly& p, const std::function<Scalar(int)>& value) {
    Scalar out(0);
    std::unordered_map<int, Scalar> cache;
    for (const auto& [m, c] : p.terms()) {
        Scalar t = c;
        for (const auto& [id, e] : m) {
            auto it = cache.find(id);
            if (it == cache.end()) it = cache.emplace(id, value(id)).first;
            t *= liesym::pow(it->second, e);
        }
        out += t;
    }
    return out;
}

double eval_poly_numeric(const Poly& p, const std::function<double(int)>& value) {
    double out = 0;
    std::unordered_map<int, double> cache;
    for (const auto& [m, c] : p.terms()) {
        double t = c.get_d();
        for (const auto& [id, e] : m) {
            auto it = cache.find(id);
            if (it == cache.end()) it = cache.emplace(id, value(id)).first;
            double v = 1;
            for (int k = 0; k < e; ++k) v *= it->second;
            t *= v;
        }
        out += t;
    }
    return out;
}

Poly poly_lcm(const Poly& a, const Poly& b) {
    if (a.is_constant()) return monic(b);
    if (b.is_constant()) return monic(a);
    return monic(exact_divide(a, poly_gcd(a, b)) * b);
}

} // namespace liesym
