#pragma once

#include "liesym/expr.hpp"

#include <functional>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

namespace liesym {

/// Sorted (atom id, exponent) pairs; exponents are positive.
using Monomial = std::vector<std::pair<int, int>>;

/// Lex order where a smaller atom id is the more significant variable.
int compare_monomials(const Monomial& a, const Monomial& b);
struct MonoGreater {
    bool operator()(const Monomial& a, const Monomial& b) const { return compare_monomials(a, b) > 0; }
};
Monomial mono_mul(const Monomial& a, const Monomial& b);
int mono_degree(const Monomial& m, int atom);

/// Sparse multivariate polynomial over interned atoms. Leading term first.
class Poly {
public:
    using Terms = std::map<Monomial, Scalar, MonoGreater>;

    Poly() = default;
    explicit Poly(const Scalar& c);
    static Poly atom(int id, int exp = 1);
    static Poly term(const Monomial& m, const Scalar& c);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    bool is_one() const;
    bool is_monomial() const { return terms_.size() == 1; }
    Scalar constant_value() const;
    const Terms& terms() const { return terms_; }
    const Monomial& lead_mono() const { return terms_.begin()->first; }
    const Scalar& lead_coeff() const { return terms_.begin()->second; }
    std::size_t size() const { return terms_.size(); }

    void add_term(const Monomial& m, const Scalar& c);
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator-() const;
    Poly operator*(const Poly& o) const;
    Poly operator*(const Scalar& c) const;
    Poly& operator+=(const Poly& o);
    bool operator==(const Poly& o) const { return terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }
    Poly pow(int e) const;

    /// Atom ids appearing in some monomial, ascending.
    std::vector<int> atoms() const;
    int degree_in(int atom) const;
    int total_degree() const;

private:
    Terms terms_;
};

/// Exact quotient; throws InternalError when b does not divide a.
Poly exact_divide(const Poly& a, const Poly& b);
bool try_divide(const Poly& a, const Poly& b, Poly& q);
Poly poly_gcd(const Poly& a, const Poly& b);
Poly poly_lcm(const Poly& a, const Poly& b);
/// Scale so the lex leading coefficient is 1.
Poly monic(const Poly& p);

/// Rational function in normal form: coprime numerator and denominator,
/// denominator monic in the lex order, exp and radical factors canonical.
class RatFun {
public:
    RatFun() : den_(Scalar(1)) {}
    RatFun(const Scalar& c) : num_(c), den_(Scalar(1)) {}
    explicit RatFun(const Poly& p) : num_(p), den_(Scalar(1)) { fixup(); }
    RatFun(const Poly& n, const Poly& d);
    static RatFun from_atom(int id);

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    bool is_polynomial() const { return den_.is_constant(); }
    Scalar constant_value() const;

    RatFun operator+(const RatFun& o) const;
    RatFun operator-(const RatFun& o) const;
    RatFun operator-() const;
    RatFun operator*(const RatFun& o) const;
    RatFun operator/(const RatFun& o) const;
    RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
    RatFun& operator-=(const RatFun& o) { return *this = *this - o; }
    RatFun& operator*=(const RatFun& o) { return *this = *this * o; }
    bool operator==(const RatFun& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RatFun& o) const { return !(*this == o); }
    RatFun pow(int e) const;
    /// Rational power under the positive-base convention.
    RatFun pow(const Scalar& e) const;

    std::vector<int> atoms() const;
    bool has_special_atoms() const;

private:
    void reduce();
    void fixup();
    Poly num_;
    Poly den_;
};

enum class AtomKind { Symbol, FuncSym, Kernel, Radical };

struct Atom {
    int id = -1;
    AtomKind kind = AtomKind::Symbol;
    std::string key;
    const SymbolInfo* sym = nullptr;
    KernelKind kernel = KernelKind::Exp;
    std::string name;
    std::vector<int> index;
    std::vector<RatFun> args;  // kernel argument, funcsym args, radical base
    int q = 1;                 // radical: base^(1/q)
    std::vector<int> symbols;  // symbol atom ids this atom depends on, sorted
    int jet_order = 0;
    Expr tree;
};

const Atom& atom(int id);
int symbol_atom(const SymbolInfo* s);
RatFun make_kernel(KernelKind k, const RatFun& arg);
RatFun make_funcsym(const std::string& name, const std::vector<RatFun>& args, const std::vector<int>& index);
/// Structural order of atoms, independent of interning history.
int compare_atoms(int a, int b);

RatFun to_ratfun(const Expr& e);
Expr to_expr(const RatFun& r);
Expr poly_to_expr(const Poly& p);

/// Partial derivative with respect to a symbol atom.
RatFun diff(const RatFun& r, int sym_atom);
RatFun diff_poly(const Poly& p, int sym_atom);
/// Polynomial partial derivative treating the atom as an independent variable.
Poly poly_partial(const Poly& p, int atom);
RatFun diff_atom(int atom_id, int sym_atom);
bool depends_on(const RatFun& r, int sym_atom);
bool atom_depends_on(int atom_id, int sym_atom);
RatFun make_radical_power(const Poly& base, const Scalar& e);

/// Simultaneous replacement of atoms; atoms whose arguments mention a bound
/// atom are rebuilt. fun_patterns replaces funcsyms by name (see substitute()).
struct FunPattern {
    std::vector<int> params;  // symbol atoms standing for the arguments
    RatFun value;
};
RatFun substitute(const RatFun& r, const std::unordered_map<int, RatFun>& atoms,
                  const std::map<std::string, FunPattern>& funs = {});

/// Evaluate with atom values supplied by a callback.
Scalar eval_poly_exact(const Poly& p, const std::function<Scalar(int)>& value);
double eval_poly_numeric(const Poly& p, const std::function<double(int)>& value);

} // namespace liesym
