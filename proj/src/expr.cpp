#include "liesym/expr.hpp"

#include "liesym/errors.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace liesym {

int register_symbol_atom(const SymbolInfo* s);  // ratfun.cpp

struct ExprAccess {
    static Expr make(std::shared_ptr<Node> n) { return Expr(std::shared_ptr<const Node>(std::move(n))); }
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_scalar(const Scalar& s) {
    return mix(std::hash<std::string>{}(s.get_str()), 17);
}

void finish_hash(Node& n) {
    std::size_t h = static_cast<std::size_t>(n.kind) * 1315423911ULL;
    switch (n.kind) {
    case NodeKind::Scalar: h = mix(h, hash_scalar(n.value)); break;
    case NodeKind::Symbol: h = mix(h, std::hash<const void*>{}(n.sym)); break;
    case NodeKind::FuncSym:
        h = mix(h, std::hash<std::string>{}(n.name));
        for (int i : n.index) h = mix(h, static_cast<std::size_t>(i));
        break;
    case NodeKind::Kernel: h = mix(h, static_cast<std::size_t>(n.kernel)); break;
    case NodeKind::Power: h = mix(h, hash_scalar(n.value)); break;
    default: break;
    }
    for (const auto& a : n.args) h = mix(h, a.hash());
    n.hash = h;
}

Expr make_scalar_node(const Scalar& s) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Scalar;
    n->value = s;
    finish_hash(*n);
    return ExprAccess::make(std::move(n));
}

Expr make_symbol_node(const SymbolInfo* s) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Symbol;
    n->sym = s;
    finish_hash(*n);
    return ExprAccess::make(std::move(n));
}

struct SymbolRegistry {
    std::mutex mu;
    std::unordered_map<std::string, std::unique_ptr<SymbolInfo>> table;
};

SymbolRegistry& registry() {
    static SymbolRegistry r;
    return r;
}

std::string symbol_key(const SymbolInfo& s) {
    std::string k = s.name + "|" + s.dependent + "|";
    for (int c : s.counts) k += std::to_string(c) + ",";
    k += "|";
    for (const auto& v : s.independents) k += v + ",";
    return k;
}

const SymbolInfo* intern_symbol(SymbolInfo info) {
    auto& r = registry();
    std::string key = symbol_key(info);
    std::lock_guard<std::mutex> lock(r.mu);
    auto it = r.table.find(key);
    if (it != r.table.end()) return it->second.get();
    auto p = std::make_unique<SymbolInfo>(std::move(info));
    p->atom_id = register_symbol_atom(p.get());
    const SymbolInfo* out = p.get();
    r.table.emplace(key, std::move(p));
    return out;
}

std::string jet_name(const std::string& dep, const std::vector<int>& counts,
                     const std::vector<std::string>& indeps) {
    int order = 0;
    for (int c : counts) order += c;
    if (order == 0) return dep;
    bool single = std::all_of(indeps.begin(), indeps.end(), [](const std::string& s) { return s.size() == 1; });
    std::string out = dep;
    if (single && order <= 4) {
        out += "_";
        for (std::size_t i = 0; i < counts.size(); ++i) out.append(static_cast<std::size_t>(counts[i]), indeps[i][0]);
        return out;
    }
    out += "[[";
    bool first = true;
    for (std::size_t i = 0; i < counts.size(); ++i)
        for (int k = 0; k < counts[i]; ++k) {
            if (!first) out += ",";
            out += std::to_string(i + 1);
            first = false;
        }
    return out + "]]";
}

int kind_rank(NodeKind k) { return static_cast<int>(k); }

int cmp_scalar(const Scalar& a, const Scalar& b) { return a < b ? -1 : (b < a ? 1 : 0); }

int compare_symbols(const SymbolInfo* a, const SymbolInfo* b) {
    if (a == b) return 0;
    if (a->order() != b->order()) return a->order() < b->order() ? -1 : 1;
    if (a->name != b->name) return a->name < b->name ? -1 : 1;
    std::string ka = symbol_key(*a), kb = symbol_key(*b);
    return ka < kb ? -1 : (ka > kb ? 1 : 0);
}

int compare_lists(const std::vector<Expr>& a, const std::vector<Expr>& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = compare(a[i], b[i]);
        if (c) return c;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

// product factor split into (base, exponent)
std::pair<Expr, Scalar> base_exp(const Expr& f) {
    if (f.kind() == NodeKind::Power) return {f.base(), f.scalar()};
    return {f, Scalar(1)};
}

// term split into (coefficient, rest)
std::pair<Scalar, Expr> coeff_rest(const Expr& t) {
    if (t.is_scalar()) return {t.scalar(), Expr(1)};
    if (t.kind() == NodeKind::Product && t.args().front().is_scalar()) {
        std::vector<Expr> rest(t.args().begin() + 1, t.args().end());
        if (rest.size() == 1) return {t.args().front().scalar(), rest.front()};
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Product;
        n->args = std::move(rest);
        finish_hash(*n);
        return {t.args().front().scalar(), ExprAccess::make(std::move(n))};
    }
    return {Scalar(1), t};
}

long term_degree(const Expr& rest) {
    if (rest.is_scalar()) return 0;
    auto fdeg = [](const Expr& f) -> long {
        auto [b, e] = base_exp(f);
        if (is_integer(e) && e > 0) return e.get_num().get_si();
        return 1;
    };
    if (rest.kind() == NodeKind::Product) {
        long d = 0;
        for (const auto& f : rest.args()) d += fdeg(f);
        return d;
    }
    return fdeg(rest);
}

int compare_terms(const Expr& a, const Expr& b) {
    auto [ca, ra] = coeff_rest(a);
    auto [cb, rb] = coeff_rest(b);
    long da = term_degree(ra), db = term_degree(rb);
    if (da != db) return da < db ? -1 : 1;
    auto factors = [](const Expr& r) {
        if (r.kind() == NodeKind::Product) return r.args();
        return std::vector<Expr>{r};
    };
    int c = compare_lists(factors(ra), factors(rb));
    if (c) return c;
    return cmp_scalar(ca, cb);
}

int compare_factors(const Expr& a, const Expr& b) {
    if (a.is_scalar() != b.is_scalar()) return a.is_scalar() ? -1 : 1;
    auto [ba, ea] = base_exp(a);
    auto [bb, eb] = base_exp(b);
    int c = compare(ba, bb);
    if (c) return c;
    return cmp_scalar(ea, eb);
}

Expr make_raw(NodeKind k, std::vector<Expr> args) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->args = std::move(args);
    finish_hash(*n);
    return ExprAccess::make(std::move(n));
}

Expr make_power_raw(const Expr& b, const Scalar& e) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Power;
    n->value = e;
    n->args = {b};
    finish_hash(*n);
    return ExprAccess::make(std::move(n));
}

} // namespace

Expr symbol_expr(const SymbolInfo* s) { return make_symbol_node(s); }

const char* kernel_name(KernelKind k) {
    switch (k) {
    case KernelKind::Exp: return "exp";
    case KernelKind::Ln: return "ln";
    case KernelKind::Sin: return "sin";
    case KernelKind::Cos: return "cos";
    case KernelKind::Arctan: return "arctan";
    }
    return "?";
}

int SymbolInfo::order() const {
    int o = 0;
    for (int c : counts) o += c;
    return o;
}

Expr::Expr() : Expr(Scalar(0)) {}
Expr::Expr(int v) : Expr(Scalar(v)) {}
Expr::Expr(long v) : Expr(Scalar(v)) {}
Expr::Expr(const Scalar& s) : n_(make_scalar_node(s).n_) {}

Expr Expr::symbol(const std::string& name) {
    SymbolInfo info;
    info.name = name;
    return make_symbol_node(intern_symbol(std::move(info)));
}

Expr Expr::jet(const std::string& dependent, const std::vector<int>& counts,
               const std::vector<std::string>& independents) {
    SymbolInfo info;
    info.name = jet_name(dependent, counts, independents);
    info.dependent = dependent;
    info.counts = counts;
    info.independents = independents;
    return make_symbol_node(intern_symbol(std::move(info)));
}

Expr Expr::funcsym(const std::string& name, std::vector<Expr> args, std::vector<int> index) {
    if (index.empty()) index.assign(args.size(), 0);
    if (index.size() != args.size()) throw InternalError("funcsym index size mismatch");
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::FuncSym;
    n->name = name;
    n->args = std::move(args);
    n->index = std::move(index);
    finish_hash(*n);
    return ExprAccess::make(std::move(n));
}

Expr Expr::kernel(KernelKind k, const Expr& arg) {
    if (arg.is_scalar()) {
        const Scalar& v = arg.scalar();
        if (v == 0) {
            if (k == KernelKind::Exp || k == KernelKind::Cos) return Expr(1);
            if (k == KernelKind::Sin || k == KernelKind::Arctan) return Expr(0);
        }
        if (v == 1 && k == KernelKind::Ln) return Expr(0);
    }
    if (k == KernelKind::Ln && arg.kind() == NodeKind::Kernel && arg.kernel_kind() == KernelKind::Exp)
        return arg.base();
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Kernel;
    n->kernel = k;
    n->args = {arg};
    finish_hash(*n);
    return ExprAccess::make(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    for (auto& t : terms) {
        if (t.kind() == NodeKind::Sum)
            flat.insert(flat.end(), t.args().begin(), t.args().end());
        else
            flat.push_back(t);
    }
    Scalar constant(0);
    std::map<Expr, Scalar, ExprLess> like;
    for (const auto& t : flat) {
        if (t.is_scalar()) {
            constant += t.scalar();
            continue;
        }
        auto [c, rest] = coeff_rest(t);
        like[rest] += c;
    }
    std::vector<Expr> out;
    if (constant != 0) out.push_back(Expr(constant));
    for (auto& [rest, c] : like) {
        if (c == 0) continue;
        out.push_back(c == 1 ? rest : Expr::product({Expr(c), rest}));
    }
    if (out.empty()) return Expr(0);
    if (out.size() == 1) return out.front();
    std::sort(out.begin(), out.end(), [](const Expr& a, const Expr& b) { return compare_terms(a, b) < 0; });
    return make_raw(NodeKind::Sum, std::move(out));
}

Expr Expr::product(std::vector<Expr> factors) {
    std::vector<Expr> flat;
    for (auto& f : factors) {
        if (f.kind() == NodeKind::Product)
            flat.insert(flat.end(), f.args().begin(), f.args().end());
        else
            flat.push_back(f);
    }
    Scalar coeff(1);
    std::map<Expr, Scalar, ExprLess> bases;
    for (const auto& f : flat) {
        if (f.is_scalar()) {
            coeff *= f.scalar();
            continue;
        }
        auto [b, e] = base_exp(f);
        bases[b] += e;
    }
    if (coeff == 0) return Expr(0);
    std::vector<Expr> out;
    for (auto& [b, e] : bases) {
        if (e == 0) continue;
        Expr p = Expr::power(b, e);
        if (p.is_scalar()) {
            coeff *= p.scalar();
        } else if (p.kind() == NodeKind::Product) {
            for (const auto& g : p.args()) {
                if (g.is_scalar())
                    coeff *= g.scalar();
                else
                    out.push_back(g);
            }
        } else {
            out.push_back(p);
        }
    }
    if (coeff == 0) return Expr(0);
    // a second pass merges bases that reappeared through power distribution
    std::map<Expr, Scalar, ExprLess> again;
    bool dup = false;
    for (const auto& f : out) {
        auto [b, e] = base_exp(f);
        if (again.count(b)) dup = true;
        again[b] += e;
    }
    if (dup) {
        std::vector<Expr> redo{Expr(coeff)};
        for (auto& [b, e] : again) redo.push_back(make_power_raw(b, e));
        return Expr::product(std::move(redo));
    }
    std::sort(out.begin(), out.end(), [](const Expr& a, const Expr& b) { return compare_factors(a, b) < 0; });
    if (out.empty()) return Expr(coeff);
    if (coeff == 1 && out.size() == 1) return out.front();
    if (coeff != 1) out.insert(out.begin(), Expr(coeff));
    return make_raw(NodeKind::Product, std::move(out));
}

Expr Expr::power(const Expr& base, const Scalar& e) {
    if (e == 0) return Expr(1);
    if (e == 1) return base;
    switch (base.kind()) {
    case NodeKind::Scalar: {
        const Scalar& c = base.scalar();
        if (c == 0) {
            if (e < 0) throw DivisionByZero("0 raised to a negative power");
            return Expr(0);
        }
        if (c == 1) return Expr(1);
        unsigned long q = e.get_den().get_ui();
        long p = e.get_num().get_si();
        Scalar root;
        if (exact_root(c, q, root)) return Expr(liesym::pow(root, p));
        if (!is_integer(e)) {
            // pull out the integer part of the exponent: c^(p/q) = c^m * c^(r/q)
            Integer m;
            mpz_fdiv_q(m.get_mpz_t(), e.get_num_mpz_t(), e.get_den_mpz_t());
            if (m != 0) {
                Scalar frac = e - Scalar(m);
                return Expr::product({Expr(liesym::pow(c, m.get_si())), make_power_raw(base, frac)});
            }
        }
        return make_power_raw(base, e);
    }
    case NodeKind::Power: return Expr::power(base.base(), base.scalar() * e);
    case NodeKind::Product: {
        std::vector<Expr> fs;
        for (const auto& f : base.args()) fs.push_back(Expr::power(f, e));
        return Expr::product(std::move(fs));
    }
    case NodeKind::Kernel:
        if (base.kernel_kind() == KernelKind::Exp) return Expr::kernel(KernelKind::Exp, Expr(e) * base.base());
        return make_power_raw(base, e);
    default: return make_power_raw(base, e);
    }
}

NodeKind Expr::kind() const { return n_->kind; }
bool Expr::is_zero() const { return n_->kind == NodeKind::Scalar && n_->value == 0; }
bool Expr::is_one() const { return n_->kind == NodeKind::Scalar && n_->value == 1; }
const Scalar& Expr::scalar() const { return n_->value; }
const SymbolInfo& Expr::sym() const { return *n_->sym; }
const std::string& Expr::name() const { return n_->kind == NodeKind::Symbol ? n_->sym->name : n_->name; }
KernelKind Expr::kernel_kind() const { return n_->kernel; }
const std::vector<int>& Expr::index() const { return n_->index; }
const std::vector<Expr>& Expr::args() const { return n_->args; }
const Expr& Expr::base() const { return n_->args.front(); }
std::size_t Expr::hash() const { return n_->hash; }

bool operator==(const Expr& a, const Expr& b) {
    if (a.n_ == b.n_) return true;
    if (a.hash() != b.hash()) return false;
    return compare(a, b) == 0;
}

int compare(const Expr& a, const Expr& b) {
    if (a.node() == b.node()) return 0;
    if (a.kind() != b.kind()) return kind_rank(a.kind()) < kind_rank(b.kind()) ? -1 : 1;
    switch (a.kind()) {
    case NodeKind::Scalar: return cmp_scalar(a.scalar(), b.scalar());
    case NodeKind::Symbol: return compare_symbols(&a.sym(), &b.sym());
    case NodeKind::FuncSym: {
        if (a.name() != b.name()) return a.name() < b.name() ? -1 : 1;
        if (a.index() != b.index()) {
            int oa = 0, ob = 0;
            for (int i : a.index()) oa += i;
            for (int i : b.index()) ob += i;
            if (oa != ob) return oa < ob ? -1 : 1;
            return a.index() > b.index() ? -1 : 1;
        }
        return compare_lists(a.args(), b.args());
    }
    case NodeKind::Kernel:
        if (a.kernel_kind() != b.kernel_kind()) return a.kernel_kind() < b.kernel_kind() ? -1 : 1;
        return compare(a.base(), b.base());
    case NodeKind::Power: {
        int c = compare(a.base(), b.base());
        if (c) return c;
        return cmp_scalar(a.scalar(), b.scalar());
    }
    case NodeKind::Product:
    case NodeKind::Sum: return compare_lists(a.args(), b.args());
    }
    return 0;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator-(const Expr& a) { return Expr::product({Expr(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw DivisionByZero("division by zero");
    return Expr::product({a, Expr::power(b, Scalar(-1))});
}
Expr pow(const Expr& base, const Scalar& e) { return Expr::power(base, e); }
Expr exp(const Expr& a) { return Expr::kernel(KernelKind::Exp, a); }
Expr ln(const Expr& a) { return Expr::kernel(KernelKind::Ln, a); }
Expr sin(const Expr& a) { return Expr::kernel(KernelKind::Sin, a); }
Expr cos(const Expr& a) { return Expr::kernel(KernelKind::Cos, a); }
Expr arctan(const Expr& a) { return Expr::kernel(KernelKind::Arctan, a); }

namespace {
void collect_symbols(const Expr& e, std::set<const SymbolInfo*>& out) {
    if (e.kind() == NodeKind::Symbol) {
        out.insert(&e.sym());
        return;
    }
    for (const auto& a : e.args()) collect_symbols(a, out);
}
} // namespace

std::set<const SymbolInfo*> free_symbols(const Expr& e) {
    std::set<const SymbolInfo*> out;
    collect_symbols(e, out);
    return out;
}

bool contains_funcsym(const Expr& e, const std::string& name) {
    if (e.kind() == NodeKind::FuncSym && e.name() == name) return true;
    for (const auto& a : e.args())
        if (contains_funcsym(a, name)) return true;
    return false;
}

// ---------------------------------------------------------------- rendering

namespace {

void render_to(const Expr& e, std::string& out);

bool is_bare_atom(const Expr& e) {
    switch (e.kind()) {
    case NodeKind::Symbol:
    case NodeKind::FuncSym:
    case NodeKind::Kernel: return true;
    case NodeKind::Scalar: return is_integer(e.scalar()) && e.scalar() >= 0;
    default: return false;
    }
}

std::string exponent_text(const Scalar& e) {
    if (is_integer(e) && e > 0) return e.get_str();
    return "(" + e.get_str() + ")";
}

void render_power(const Expr& b, const Scalar& e, std::string& out) {
    if (e == 1) {
        if (b.kind() == NodeKind::Sum || b.kind() == NodeKind::Product || (b.is_scalar() && !is_bare_atom(b))) {
            out += "(";
            render_to(b, out);
            out += ")";
        } else {
            render_to(b, out);
        }
        return;
    }
    if (is_bare_atom(b)) {
        render_to(b, out);
    } else {
        out += "(";
        render_to(b, out);
        out += ")";
    }
    out += "^" + exponent_text(e);
}

// Renders a product (or single factor) with the sign already stripped.
void render_unsigned_product(const Scalar& coeff, const std::vector<Expr>& factors, std::string& out) {
    std::vector<std::string> num, den;
    Integer cn = abs(coeff.get_num()), cd = coeff.get_den();
    if (cn != 1) num.push_back(cn.get_str());
    if (cd != 1) den.push_back(cd.get_str());
    for (const auto& f : factors) {
        auto [b, e] = base_exp(f);
        std::string s;
        if (e < 0) {
            render_power(b, -e, s);
            den.push_back(s);
        } else {
            render_power(b, e, s);
            num.push_back(s);
        }
    }
    if (num.empty()) num.push_back("1");
    for (std::size_t i = 0; i < num.size(); ++i) {
        if (i) out += "*";
        out += num[i];
    }
    if (!den.empty()) {
        out += "/";
        if (den.size() > 1) out += "(";
        for (std::size_t i = 0; i < den.size(); ++i) {
            if (i) out += "*";
            out += den[i];
        }
        if (den.size() > 1) out += ")";
    }
}

// Returns true when the term carries a negative sign, which is not emitted.
bool render_term(const Expr& t, std::string& out) {
    if (t.is_scalar()) {
        const Scalar& c = t.scalar();
        Scalar a = abs(c);
        out += a.get_str();
        return c < 0;
    }
    if (t.kind() == NodeKind::Product) {
        Scalar coeff(1);
        std::vector<Expr> fs;
        for (const auto& f : t.args()) {
            if (f.is_scalar())
                coeff *= f.scalar();
            else
                fs.push_back(f);
        }
        render_unsigned_product(coeff, fs, out);
        return coeff < 0;
    }
    if (t.kind() == NodeKind::Power && t.scalar() < 0) {
        render_unsigned_product(Scalar(1), {t}, out);
        return false;
    }
    if (t.kind() == NodeKind::Power) {
        render_power(t.base(), t.scalar(), out);
        return false;
    }
    render_to(t, out);
    return false;
}

void render_to(const Expr& e, std::string& out) {
    switch (e.kind()) {
    case NodeKind::Scalar: out += e.scalar().get_str(); return;
    case NodeKind::Symbol: out += e.sym().name; return;
    case NodeKind::FuncSym: {
        out += e.name();
        bool any = std::any_of(e.index().begin(), e.index().end(), [](int i) { return i != 0; });
        if (any) {
            out += "{";
            for (std::size_t i = 0; i < e.index().size(); ++i) {
                if (i) out += ",";
                out += std::to_string(e.index()[i]);
            }
            out += "}";
        }
        out += "(";
        for (std::size_t i = 0; i < e.args().size(); ++i) {
            if (i) out += ",";
            render_to(e.args()[i], out);
        }
        out += ")";
        return;
    }
    case NodeKind::Kernel:
        out += kernel_name(e.kernel_kind());
        out += "(";
        render_to(e.base(), out);
        out += ")";
        return;
    case NodeKind::Power:
        render_power(e.base(), e.scalar(), out);
        return;
    case NodeKind::Product: {
        std::string body;
        if (render_term(e, body)) out += "-";
        out += body;
        return;
    }
    case NodeKind::Sum: {
        bool first = true;
        for (const auto& t : e.args()) {
            std::string body;
            bool neg = render_term(t, body);
            if (first)
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            out += body;
            first = false;
        }
        return;
    }
    }
}

} // namespace

std::string render(const Expr& e) {
    std::string out;
    render_to(e, out);
    return out;
}

} // namespace liesym
