#include "liesym/jet.hpp"

#include "liesym/errors.hpp"
#include "liesym/expr_ops.hpp"

#include <random>

namespace liesym {

Expr JetSpace::x(int i) const { return Expr::symbol(independents.at(static_cast<std::size_t>(i))); }

Expr JetSpace::u(int alpha) const { return var(alpha, std::vector<int>(independents.size(), 0)); }

Expr JetSpace::var(int alpha, const std::vector<int>& counts) const {
    return Expr::jet(dependents.at(static_cast<std::size_t>(alpha)), counts, independents);
}

namespace {
void enumerate(std::vector<int>& cur, std::size_t pos, int left, std::vector<std::vector<int>>& out) {
    if (pos + 1 == cur.size()) {
        cur[pos] = left;
        out.push_back(cur);
        return;
    }
    for (int k = left; k >= 0; --k) {
        cur[pos] = k;
        enumerate(cur, pos + 1, left - k, out);
    }
}
} // namespace

std::vector<std::vector<int>> JetSpace::multi_indices(int order) const {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(independents.size(), 0);
    if (cur.empty()) return out;
    enumerate(cur, 0, order, out);
    return out;
}

std::vector<Expr> JetSpace::coordinates() const {
    std::vector<Expr> out;
    for (int i = 0; i < p(); ++i) out.push_back(x(i));
    for (int k = 0; k <= n; ++k)
        for (const auto& J : multi_indices(k))
            for (int a = 0; a < q(); ++a) out.push_back(var(a, J));
    return out;
}

long JetSpace::dimension() const { return jet_dimension(p(), q(), n); }

JetSpace JetSpace::with_order(int order) const {
    JetSpace s = *this;
    s.n = order;
    return s;
}

long binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

long jet_dimension(int p, int q, int n) { return p + q * binomial(p + n, n); }

int JetCoord::order() const {
    int o = 0;
    for (int c : counts) o += c;
    return o;
}

std::optional<JetCoord> jet_coord(const SymbolInfo& s, const JetSpace& space) {
    if (!s.is_jet() || s.independents != space.independents) return std::nullopt;
    for (int a = 0; a < space.q(); ++a)
        if (space.dependents[static_cast<std::size_t>(a)] == s.dependent) return JetCoord{a, s.counts};
    return std::nullopt;
}

std::optional<int> independent_index(const SymbolInfo& s, const JetSpace& space) {
    if (s.is_jet()) return std::nullopt;
    for (int i = 0; i < space.p(); ++i)
        if (space.independents[static_cast<std::size_t>(i)] == s.name) return i;
    return std::nullopt;
}

RatFun total_derivative(const RatFun& e, int i, const JetSpace& space) {
    RatFun out;
    for (int s : symbol_atoms(e)) {
        const SymbolInfo& info = *atom(s).sym;
        if (auto xi = independent_index(info, space)) {
            if (*xi == i) out += diff(e, s);
            continue;
        }
        if (auto jc = jet_coord(info, space)) {
            std::vector<int> c = jc->counts;
            c[static_cast<std::size_t>(i)]++;
            RatFun next = to_ratfun(space.var(jc->alpha, c));
            out += next * diff(e, s);
        }
    }
    return out;
}

RatFun total_derivative(const RatFun& e, const std::vector<int>& counts, const JetSpace& space) {
    RatFun r = e;
    for (std::size_t i = 0; i < counts.size(); ++i)
        for (int k = 0; k < counts[i]; ++k) r = total_derivative(r, static_cast<int>(i), space);
    return r;
}

Expr total_derivative(const Expr& e, int i, const JetSpace& space) {
    return to_expr(total_derivative(to_ratfun(e), i, space));
}

int differential_order(const RatFun& r) {
    int o = 0;
    for (int s : symbol_atoms(r)) o = std::max(o, atom(s).jet_order);
    return o;
}

int differential_order(const Expr& e) {
    int o = 0;
    for (const SymbolInfo* s : free_symbols(e)) o = std::max(o, s->order());
    return o;
}

std::map<std::string, Scalar> generic_point(const JetSpace& space, std::uint64_t seed) {
    std::map<std::string, Scalar> out;
    std::mt19937_64 rng(seed);
    for (const auto& c : space.coordinates()) {
        long k = 1 + static_cast<long>(rng() % 97);
        long d = 1 + static_cast<long>(rng() % 3);
        out[c.name()] = make_scalar(k, d);
    }
    return out;
}

} // namespace liesym
