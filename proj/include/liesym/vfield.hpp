#pragma once

#include "liesym/jet.hpp"
#include "liesym/linsolve.hpp"

#include <string>
#include <vector>

namespace liesym {

/// v = sum xi_i d/dx_i + sum phi_a d/du_a over the base space of a JetSpace.
struct VectorField {
    std::vector<Expr> xi;
    std::vector<Expr> phi;

    /// Coefficient of the k-th base coordinate (x's first, then u's).
    const Expr& coeff(std::size_t k) const { return k < xi.size() ? xi[k] : phi[k - xi.size()]; }
    std::size_t size() const { return xi.size() + phi.size(); }
};

VectorField zero_field(const JetSpace& space);
/// The coordinate field d/dz for the k-th base coordinate.
VectorField unit_field(const JetSpace& space, std::size_t k);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& c, const VectorField& v);
VectorField normalize(const VectorField& v);
bool is_zero(const VectorField& v);
/// Deterministic coefficient-wise equality of normal forms.
bool fields_equal(const VectorField& a, const VectorField& b);
VectorField linear_combination(const std::vector<Scalar>& c, const std::vector<VectorField>& fields);

/// Coordinates over a shared (slot, monomial) index after clearing one common
/// denominator, so constant linear relations among fields match those among vectors.
std::vector<Vector> coefficient_vectors(const std::vector<VectorField>& fields);

/// Text form "x^2@x + x*u@u", parseable by parse_vector_field.
std::string render_field(const VectorField& v, const JetSpace& space);

struct ProlongedEntry {
    JetCoord coord;
    Expr var;
    RatFun coeff;
};

struct ProlongedField {
    VectorField base;
    int n = 0;
    std::vector<ProlongedEntry> entries;  // every u_{a,J} with 1 <= #J <= n

    /// Coefficient of u_{a,J}; zero when outside the stored range.
    RatFun coefficient(int alpha, const std::vector<int>& counts) const;
    /// Coefficient of a derivative coordinate (order >= 1).
    Expr coefficient(const Expr& var) const;
};

enum class ProlongMethod { Recursive, Direct, Characteristic };

/// pr^n v. With verify set, all three formulas run and must agree exactly
/// (InternalError otherwise).
ProlongedField prolong(const VectorField& v, int n, const JetSpace& space,
                       ProlongMethod method = ProlongMethod::Recursive, bool verify = false);

std::vector<Expr> characteristic(const VectorField& v, const JetSpace& space);

/// Lie bracket in coordinates: [v,w]_k = v(w_k) - w(v_k).
VectorField bracket(const VectorField& v, const VectorField& w, const JetSpace& space);

/// v(f) for a base field; throws OrderMismatch if f involves derivatives.
Expr lie_derivative(const VectorField& v, const Expr& f, const JetSpace& space);
/// pr^n v(f); throws OrderMismatch if order(f) > n.
Expr lie_derivative(const ProlongedField& v, const Expr& f, const JetSpace& space);
RatFun apply_field(const VectorField& v, const RatFun& f, const JetSpace& space);
RatFun apply_prolonged(const ProlongedField& v, const RatFun& f, const JetSpace& space);

/// Field in new coordinates w = psi(z); inverse gives z in terms of w.
/// Throws NotInverse unless psi(inverse(w)) == w.
VectorField pushforward(const VectorField& v, const JetSpace& space, const std::vector<Expr>& psi,
                        const std::vector<Expr>& inverse, const JetSpace& target, bool* probabilistic = nullptr);

bool rectify_check(const VectorField& v, const Expr& r, const Expr& s, const JetSpace& space,
                   bool* probabilistic = nullptr);

/// sum_{j<=N} t^j/j! v^j(f).
Expr flow_series(const VectorField& v, const Expr& f, const Expr& t, int N, const JetSpace& space);

} // namespace liesym
