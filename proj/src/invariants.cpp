#include "liesym/invariants.hpp"

#include "liesym/errors.hpp"
#include "liesym/expr_ops.hpp"
#include "liesym/linsolve.hpp"

#include <algorithm>

namespace liesym {

namespace {

std::size_t rank_for_seed(const std::vector<std::vector<RatFun>>& rows, const JetSpace& space, std::uint64_t& seed) {
    for (int attempt = 0; attempt < 5; ++attempt, ++seed) {
        try {
            return rank_at_point(rows, generic_point(space, seed));
        } catch (const DivisionByZero&) {
        } catch (const DomainFault&) {
        }
    }
    throw DomainFault("coefficient matrix could not be evaluated at five generic points");
}

} // namespace

InvariantCount invariant_count(const std::vector<VectorField>& basis, const JetSpace& base, int n, std::uint64_t seed) {
    if (n < 0) throw ValidationError("order must be non-negative");
    JetSpace space = base.with_order(n);
    std::vector<std::vector<RatFun>> rows;
    for (const auto& v : basis) {
        ProlongedField pr = prolong(v, n, space);
        std::vector<RatFun> row;
        for (std::size_t k = 0; k < v.size(); ++k) row.push_back(to_ratfun(v.coeff(k)));
        for (const auto& e : pr.entries) row.push_back(e.coeff);
        rows.push_back(std::move(row));
    }
    InvariantCount out;
    out.order = n;
    out.dimension = space.dimension();
    std::uint64_t s = seed;
    for (int i = 0; i < 3; ++i) {
        out.ranks.push_back(rank_for_seed(rows, space, s));
        out.seeds.push_back(s++);
    }
    if (std::adjacent_find(out.ranks.begin(), out.ranks.end(), std::not_equal_to<>()) != out.ranks.end())
        for (int i = 0; i < 2; ++i) {
            out.ranks.push_back(rank_for_seed(rows, space, s));
            out.seeds.push_back(s++);
        }
    out.rank = *std::max_element(out.ranks.begin(), out.ranks.end());
    out.count = out.dimension - static_cast<long>(out.rank);
    return out;
}

InvarianceResult is_invariant(const std::vector<VectorField>& basis, const Expr& inv, int n, const JetSpace& base) {
    RatFun f = to_ratfun(inv);
    if (differential_order(f) > n) throw OrderMismatch("invariant has order " + std::to_string(differential_order(f)) + " > " + std::to_string(n));
    JetSpace space = base.with_order(n);
    InvarianceResult out;
    out.invariant = true;
    for (const auto& v : basis) {
        RatFun img = apply_prolonged(prolong(v, n, space), f, space);
        EquivalenceResult r = zero_test(img, RatFun());
        if (r.branch == EqualityBranch::Probabilistic) out.probabilistic = true;
        out.images.push_back(r.equal ? Expr(0) : to_expr(img));
        if (!r.equal) out.invariant = false;
    }
    return out;
}

Expr tresse_derivative(const Expr& i, const Expr& j, const JetSpace& space) {
    RatFun di = total_derivative(to_ratfun(i), 0, space);
    if (zero_test(di, RatFun()).equal) throw ZeroDenominator("D_x I vanishes identically");
    return to_expr(total_derivative(to_ratfun(j), 0, space) / di);
}

LinearizationVerdict linearization_test(const Expr& f_expr, const Expr& x, const Expr& y, const Expr& p) {
    for (const auto* s : {&x, &y, &p})
        if (s->kind() != NodeKind::Symbol) throw ValidationError("linearization_test needs symbols x, y, p");
    int ix = x.sym().atom_id, iy = y.sym().atom_id, ip = p.sym().atom_id;
    RatFun f = to_ratfun(f_expr);
    for (int a : symbol_atoms(f))
        if (a != ix && a != iy && a != ip) throw ValidationError("f may depend only on x, y and p");
    RatFun pv = RatFun::from_atom(ip);
    auto dhat = [&](const RatFun& g) { return diff(g, ix) + pv * diff(g, iy) + f * diff(g, ip); };
    RatFun fp = diff(f, ip), fy = diff(f, iy);
    RatFun fpp = diff(fp, ip), fyp = diff(fy, ip), fyy = diff(fy, iy);
    RatFun i1 = diff(diff(fpp, ip), ip);
    RatFun dfpp = dhat(fpp);
    RatFun i2 = dhat(dfpp) - RatFun(Scalar(4)) * dhat(fyp) - fp * dfpp + RatFun(Scalar(6)) * fyy -
                RatFun(Scalar(3)) * fy * fpp + RatFun(Scalar(4)) * fp * fyp;
    LinearizationVerdict out;
    EquivalenceResult z1 = zero_test(i1, RatFun()), z2 = zero_test(i2, RatFun());
    out.probabilistic = z1.branch == EqualityBranch::Probabilistic || z2.branch == EqualityBranch::Probabilistic;
    out.i1 = z1.equal ? Expr(0) : to_expr(i1);
    out.i2 = z2.equal ? Expr(0) : to_expr(i2);
    out.linearizable = z1.equal && z2.equal;
    return out;
}

} // namespace liesym
