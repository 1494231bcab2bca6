#include "support.hpp"

#include "liesym/algebra.hpp"
#include "liesym/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace liesym;
using namespace liesym::test;

namespace {

const SymbolContext xy = ctx_of({"x"}, {"y"});

LieAlgebra from_file(const std::string& file) {
    ProblemSpec s = load_problem(file);
    std::vector<VectorField> fs;
    std::vector<std::string> names;
    for (const auto& f : s.fields) {
        fs.push_back(f.field);
        names.push_back(f.name);
    }
    return structure_constants(fs, s.space(), names);
}

Vector e(std::size_t n, std::size_t i) {
    Vector v(n, Scalar(0));
    v[i] = 1;
    return v;
}

LieAlgebra o3() {
    // [v1,v2]=v3, [v3,v1]=v2, [v2,v3]=v1
    return algebra_from_brackets(3, {{0, 1, e(3, 2)}, {0, 2, Vector{0, -1, 0}}, {1, 2, e(3, 0)}}, {"v1", "v2", "v3"});
}

} // namespace

TEST(StructureConstants, E2) {
    LieAlgebra g = from_file("e2.prob");
    EXPECT_EQ(g.c[0][2], e(3, 1));
    EXPECT_EQ(g.c[1][2], (Vector{-1, 0, 0}));
    EXPECT_EQ(g.c[0][1], Vector(3, Scalar(0)));
}

TEST(StructureConstants, Sl2InY) {
    LieAlgebra g = from_file("sl2.prob");
    EXPECT_EQ(g.c[0][1], e(3, 0));
    EXPECT_EQ(g.c[0][2], (Vector{0, 2, 0}));
    EXPECT_EQ(g.c[1][2], e(3, 2));
}

TEST(StructureConstants, NotClosed) {
    EXPECT_THROW(structure_constants({F("@x", xy), F("x^2 @x", xy)}, xy.space()), NotClosed);
    EXPECT_THROW(structure_constants({F("@x", xy), F("2 @x", xy)}, xy.space()), DependentBasis);
}

TEST(StructureConstants, Abelian) {
    SymbolContext c = ctx_of({"x"}, {"y"});
    LieAlgebra g = structure_constants({F("@x", c), F("@y", c)}, c.space());
    for (auto& row : g.c)
        for (auto& v : row) EXPECT_EQ(v, Vector(2, Scalar(0)));
    EXPECT_TRUE(derived_series(g).solvable);
    EXPECT_EQ(derived_series(g).dims(), (std::vector<std::size_t>{2, 0}));
    EXPECT_EQ(center(g).size(), 2u);
}

TEST(DerivedSeries, E2AndSl2) {
    DerivedSeries a = derived_series(from_file("e2.prob"));
    EXPECT_EQ(a.dims(), (std::vector<std::size_t>{3, 2, 0}));
    EXPECT_TRUE(a.solvable);
    DerivedSeries b = derived_series(from_file("sl2.prob"));
    EXPECT_EQ(b.dims(), (std::vector<std::size_t>{3, 3}));
    EXPECT_FALSE(b.solvable);
}

TEST(Center, Examples) {
    LieAlgebra g = from_file("drift_half.prob");
    Subspace z = center(g);
    ASSERT_EQ(z.size(), 1u);
    EXPECT_EQ(render_combination(z[0], g.names), "v0");
    EXPECT_TRUE(center(o3()).empty());
}

TEST(Normalizer, RegressionTriple) {
    SymbolContext c = ctx_of({"x"}, {"y"});
    LieAlgebra a23 = structure_constants({F("@y", c), F("x @x + y @y", c)}, c.space());
    EXPECT_EQ(normalizer(a23, {e(2, 0)}).size(), 2u);
    Subspace n2 = normalizer(a23, {e(2, 1)});
    ASSERT_EQ(n2.size(), 1u);
    EXPECT_EQ(n2[0], e(2, 1));
    Subspace n3 = normalizer(from_file("sl2.prob"), {e(3, 0)});
    ASSERT_EQ(n3.size(), 2u);
    EXPECT_EQ(n3[0], e(3, 0));
    EXPECT_EQ(n3[1], e(3, 1));
}

TEST(Adjoint, NilpotentSeriesTerminates) {
    LieAlgebra g = from_file("drift_half.prob");
    Expr eps = Expr::symbol("eps");
    AdjointResult r = adjoint_exact(g, e(6, 0), e(6, 2), eps);
    SymbolContext c;
    c.symbols = {"eps"};
    // literal basis: [v1,v3] = 2 v2 - v0/2
    EXPECT_TRUE(same(r.exact[0], P("eps^2", c)));
    EXPECT_TRUE(same(r.exact[1], P("2*eps", c)));
    EXPECT_TRUE(same(r.exact[2], Expr(1)));
    EXPECT_TRUE(same(r.exact[5], P("-eps/2", c)));
    AdjointResult zero = adjoint_exact(g, e(6, 0), e(6, 2), Expr(0));
    EXPECT_TRUE(zero.exact[2].is_one());
    EXPECT_TRUE(zero.exact[0].is_zero());
}

TEST(Adjoint, RotationIsNotNilpotent) {
    EXPECT_THROW(adjoint_exact(o3(), e(3, 1), e(3, 0), Expr::symbol("eps")), NotNilpotent);
}

TEST(Adjoint, NumericRotation) {
    double eps = M_PI / 6;
    AdjointResult r = adjoint_numeric(o3(), e(3, 1), e(3, 0), eps);
    EXPECT_NEAR(r.numeric[0], std::cos(eps), 1e-12);
    EXPECT_NEAR(r.numeric[1], 0, 1e-12);
    EXPECT_NEAR(r.numeric[2], -std::sin(eps), 1e-12);
}

TEST(Adjoint, MatrixExpOfZero) {
    auto m = matrix_exp({{0, 0}, {0, 0}});
    EXPECT_EQ(m, (std::vector<std::vector<double>>{{1, 0}, {0, 1}}));
}

TEST(Classify2D, Realizations) {
    SymbolContext c = ctx_of({"x"}, {"y"});
    JetSpace sp = c.space();
    EXPECT_EQ(classify_2d(F("@x", c), F("@y", c), sp).tag, Realization::A21);
    EXPECT_EQ(classify_2d(F("@y", c), F("x @y", c), sp).tag, Realization::A22);
    Classification2D ef = classify_2d(F("x^2 @x + x*y @y", c), F("x @x + 3*y @y", c), sp);
    EXPECT_EQ(ef.tag, Realization::A23);
    EXPECT_FALSE(ef.abelian);
    EXPECT_FALSE(ef.connected);
    Classification2D rc = classify_2d(F("y @x - y^3 @y", c), F("x/y*(1 - x*y/2)*(y @x - y^3 @y)", c), sp);
    EXPECT_EQ(rc.tag, Realization::A24);
    EXPECT_TRUE(rc.connected);
    EXPECT_THROW(classify_2d(F("@x", c), F("2 @x", c), sp), NotTwoDimensional);
    EXPECT_THROW(classify_2d(F("@x", c), F("x^2 @x", c), sp), NotClosed);
}

TEST(Identities, AbstractAlgebraChecked) {
    EXPECT_NO_THROW(verify_lie_identities(o3()));
    EXPECT_THROW(algebra_from_brackets(3, {{0, 1, e(3, 0)}, {0, 2, e(3, 2)}, {1, 2, e(3, 0)}}), InternalError);
}
