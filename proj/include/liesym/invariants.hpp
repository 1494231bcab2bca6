#pragma once

#include "liesym/vfield.hpp"

#include <cstdint>
#include <vector>

namespace liesym {

struct InvariantCount {
    int order = 0;
    long dimension = 0;
    std::size_t rank = 0;
    long count = 0;  // dim J^n - rank Z
    std::vector<std::uint64_t> seeds;
    std::vector<std::size_t> ranks;  // per seed
};

/// Rank of the prolonged coefficient matrix Z at generic points, maximum over seeds.
InvariantCount invariant_count(const std::vector<VectorField>& basis, const JetSpace& space, int n, std::uint64_t seed = 42);

struct InvarianceResult {
    bool invariant = false;
    bool probabilistic = false;
    std::vector<Expr> images;  // pr^n v(I) per field
};

/// Throws OrderMismatch when order(I) > n, Undecided from the probe branch.
InvarianceResult is_invariant(const std::vector<VectorField>& basis, const Expr& inv, int n, const JetSpace& space);

/// D_x J / D_x I for the first independent variable; ZeroDenominator when D_x I = 0.
Expr tresse_derivative(const Expr& i, const Expr& j, const JetSpace& space);

struct LinearizationVerdict {
    Expr i1;
    Expr i2;
    bool linearizable = false;
    bool probabilistic = false;
};

/// Tresse invariants of y'' = f(x, y, p).
LinearizationVerdict linearization_test(const Expr& f, const Expr& x, const Expr& y, const Expr& p);

} // namespace liesym
