#pragma once

#include "liesym/jet.hpp"
#include "liesym/parse.hpp"
#include "liesym/vfield.hpp"

#include <string>
#include <vector>

namespace liesym {

struct DiffEquation {
    RatFun expr;  // E = 0
    Expr lead;
    JetCoord lead_coord;
    RatFun solved;  // value of lead on E = 0
};

/// System E_nu = 0, each solved for a distinct leading derivative.
struct DiffSystem {
    JetSpace space;  // n = highest order present
    std::vector<DiffEquation> equations;

    /// Throws NonAffineLeading, ZeroLeadingCoefficient, ValidationError.
    static DiffSystem make(const JetSpace& base, const std::vector<std::pair<Expr, Expr>>& equations_and_leads);
    static DiffSystem from_problem(const ProblemSpec& spec);

    /// Replace leading derivatives and their derivatives until none remain.
    RatFun on_shell(const RatFun& r) const;
};

/// Value of lead on E = 0. E must be affine in lead.
Expr leading_solve(const Expr& e, const Expr& lead);
RatFun leading_solve(const RatFun& e, const Expr& lead);

struct DeterminingSystem {
    VectorField generic;                // funcsym coefficients xi_i(x,u), phi_a(x,u)
    std::vector<std::string> unknowns;  // their names
    std::vector<Expr> residuals;        // each linear homogeneous in the unknowns
    std::vector<Expr> denominators;     // cleared, assumed nonzero
};

DeterminingSystem determining_system(const DiffSystem& sys);

enum class Verdict { Exact, Relative, Fail };
const char* verdict_name(Verdict v);

struct CheckResult {
    Verdict verdict = Verdict::Fail;
    std::vector<Expr> lambda;    // relative: pr v(E_nu) = lambda_nu E_nu
    std::vector<Expr> residual;  // on-shell pr v(E_nu)
    bool probabilistic = false;
};

CheckResult symmetry_check(const VectorField& v, const DiffSystem& sys);

enum class Profile { Generic, Quasilinear };
const char* profile_name(Profile p);

struct Ansatz {
    Profile profile = Profile::Generic;
    int degree = 2;
    std::vector<Expr> extra;  // each multiplies every polynomial term of every slot
};

/// Basis terms of every slot in column order: slot k, term expression.
std::vector<std::pair<std::size_t, Expr>> ansatz_terms(const JetSpace& space, const Ansatz& a);

struct Generator {
    VectorField field;
    bool superposition = false;
};

struct SymmetryBasis {
    std::vector<Generator> generators;
    Ansatz ansatz;
    std::size_t unknowns = 0;
    std::size_t rows = 0;
    std::vector<Expr> denominators;
    std::vector<std::string> warnings;

    std::vector<VectorField> fields() const;
    std::vector<VectorField> structural() const;  // non-superposition generators
};

/// Direct ansatz route; nullspace canonicalized by reduced echelon form.
SymmetryBasis solve_symmetries(const DiffSystem& sys, const Ansatz& ansatz);

/// Same ansatz plugged into the residuals of determining_system.
SymmetryBasis solve_determining_system(const DiffSystem& sys, const DeterminingSystem& ds, const Ansatz& ansatz);

} // namespace liesym
