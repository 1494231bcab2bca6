#pragma once

#include "liesym/linsolve.hpp"
#include "liesym/vfield.hpp"

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace liesym {

/// Basis plus structure constants: [e_i, e_j] = sum_k c[i][j][k] e_k.
struct LieAlgebra {
    std::vector<VectorField> basis;  // empty for an abstract algebra
    JetSpace space;
    std::vector<std::string> names;
    std::vector<std::vector<Vector>> c;

    std::size_t dim() const { return c.size(); }
    const Scalar& constant(std::size_t i, std::size_t j, std::size_t k) const { return c[i][j][k]; }
    Vector bracket(const Vector& a, const Vector& b) const;
    /// Matrix of ad(a) acting on coordinate columns: row k, column j = [a, e_j]_k.
    std::vector<Vector> ad(const Vector& a) const;
};

/// Throws DependentBasis, or NotClosed naming the pair and the leftover field.
LieAlgebra structure_constants(const std::vector<VectorField>& basis, const JetSpace& space,
                               std::vector<std::string> names = {});
/// Abstract algebra from [e_i,e_j] for i<j; checks antisymmetry and Jacobi.
LieAlgebra algebra_from_brackets(std::size_t dim, const std::vector<std::tuple<std::size_t, std::size_t, Vector>>& brackets,
                                 std::vector<std::string> names = {});

/// Throws InternalError if antisymmetry or Jacobi fail.
void verify_lie_identities(const LieAlgebra& g);

/// Linear combination "2*v2 - v0/2" in basis names.
std::string render_combination(const Vector& coords, const std::vector<std::string>& names);
/// Table text, one row per basis element.
std::string commutator_table(const LieAlgebra& g);

/// Subalgebra given by reduced echelon rows in basis coordinates.
using Subspace = std::vector<Vector>;

struct DerivedSeries {
    std::vector<Subspace> chain;  // g, g', g'', ... up to stabilization
    bool solvable = false;
    std::vector<std::size_t> dims() const;
};

Subspace bracket_span(const LieAlgebra& g, const Subspace& a, const Subspace& b);
DerivedSeries derived_series(const LieAlgebra& g);
Subspace center(const LieAlgebra& g);
/// Largest subalgebra in which h is an ideal. Throws NotClosed if h is not a subalgebra.
Subspace normalizer(const LieAlgebra& g, const Subspace& h);
bool is_subalgebra(const LieAlgebra& g, const Subspace& h);

enum class AdjointMode { Exact, Numeric };

struct AdjointResult {
    AdjointMode mode = AdjointMode::Exact;
    std::vector<Expr> exact;     // polynomials in the parameter
    std::vector<double> numeric;
};

/// Ad(exp(eps v)) w = w + eps [v,w] + eps^2/2 [v,[v,w]] + ...
/// Exact mode throws NotNilpotent unless ad(v) is nilpotent.
AdjointResult adjoint_exact(const LieAlgebra& g, const Vector& v, const Vector& w, const Expr& eps);
AdjointResult adjoint_numeric(const LieAlgebra& g, const Vector& v, const Vector& w, double eps);
bool is_nilpotent(const std::vector<Vector>& matrix);

/// exp(M) by scaling and squaring with a Taylor core.
std::vector<std::vector<double>> matrix_exp(const std::vector<std::vector<double>>& m);

enum class Realization { A21, A22, A23, A24 };
const char* realization_name(Realization r);

struct Classification2D {
    Realization tag = Realization::A21;
    bool abelian = true;
    bool connected = false;
    std::size_t rank = 0;
    Vector bracket;  // [v1,v2] in the basis (v1,v2)
    std::vector<std::uint64_t> seeds;
};

/// Throws NotTwoDimensional, NotClosed.
Classification2D classify_2d(const VectorField& v1, const VectorField& v2, const JetSpace& space, std::uint64_t seed = 42);

} // namespace liesym
