#include "support.hpp"

#include "liesym/errors.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace liesym;
using namespace liesym::test;

namespace {

const SymbolContext tx = ctx_of({"t", "x"}, {"u"});

} // namespace

TEST(Parse, JetVariables) {
    Expr e = P("x^2*u_xx + 5*u_x", tx);
    Expr uxx = Expr::jet("u", {0, 2}, {"t", "x"}), ux = Expr::jet("u", {0, 1}, {"t", "x"});
    EXPECT_TRUE(same(e, pow(Expr::symbol("x"), 2) * uxx + Expr(5) * ux));
    EXPECT_EQ(P("u_xx", tx), uxx);
}

TEST(Parse, MixedDerivativeOrderInsensitive) {
    EXPECT_EQ(P("u_xt", tx), P("u_tx", tx));
    EXPECT_EQ(P("u[[1,2]]", tx), P("u_tx", tx));
    EXPECT_EQ(P("u[[2,1,2]]", tx), P("u_txx", tx));
}

TEST(Parse, TrailingOperatorReportsColumn) {
    try {
        P("2*", tx);
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.column(), 3);
        EXPECT_EQ(e.line(), 1);
    }
}

TEST(Parse, UnknownIdentifier) { EXPECT_THROW(P("z + x", tx), UnknownIdentifier); }

TEST(Parse, Precedence) {
    SymbolContext c = ctx_of({"x"}, {"y"});
    EXPECT_TRUE(same(P("-x^2", c), -(Expr::symbol("x") * Expr::symbol("x"))));
    EXPECT_TRUE(same(P("2^3^2", c), Expr(512)));
    EXPECT_TRUE(same(P("x/2*3", c), Expr(3) * Expr::symbol("x") / Expr(2)));
}

TEST(Parse, VectorField) {
    SymbolContext c = ctx_of({"x"}, {"u"});
    VectorField v = F("x^2 @x + x*u @u", c);
    EXPECT_TRUE(same(v.xi[0], P("x^2", c)));
    EXPECT_TRUE(same(v.phi[0], P("x*u", c)));
    EXPECT_EQ(render_field(v, c.space()), "x^2@x + u*x@u");
    EXPECT_THROW(F("x @x * @u", c), ParseError);
    EXPECT_THROW(F("u_x @x", c), ValidationError);
}

TEST(Render, Examples) {
    SymbolContext c = ctx_of({"x"}, {"u"});
    EXPECT_EQ(render(P("u - x*u_x", c)), "u - x*u_x");
    EXPECT_EQ(render(Expr(make_scalar(3, 2))), "3/2");
    SymbolContext cy = ctx_of({"x"}, {"y"});
    EXPECT_EQ(render(pow(Expr(1) + pow(P("y_x", cy), 2), make_scalar(-3, 2))), "(1 + y_x^2)^(-3/2)");
}

TEST(Problem, HeatFile) {
    ProblemSpec s = parse_problem("vars t x\nunknowns u\nequation u_t = x*u_xx + 5*u_x  leading u_xx\n"
                                  "vf v1 = x^2 @x + x*u @u\noption seed 42\noption degree 2\n");
    EXPECT_EQ(s.independents.size(), 2u);
    EXPECT_EQ(s.dependents.size(), 1u);
    ASSERT_EQ(s.equations.size(), 1u);
    EXPECT_EQ(s.equations[0].lead, Expr::jet("u", {0, 2}, {"t", "x"}));
    EXPECT_EQ(s.seed, 42u);
    EXPECT_EQ(s.degree, 2);
    ASSERT_NE(s.field("v1"), nullptr);
}

TEST(Problem, UndeclaredSymbol) {
    EXPECT_THROW(parse_problem("vars x\nunknowns u\nequation u_xx = z\n"), UnknownIdentifier);
}

TEST(Problem, LeadAbsentFromEquation) {
    EXPECT_THROW(parse_problem("vars t x\nunknowns u\nequation u_t = u_xx leading u_tt\n"), ValidationError);
}

TEST(Problem, UnknownDirective) { EXPECT_THROW(parse_problem("vars x\nfrobnicate\n"), ParseError); }

TEST(Problem, ShippedFilesParse) {
    for (const char* f : {"heat.prob", "drift_diffusion.prob", "drift_half.prob", "e2.prob", "sl2.prob", "free_particle.prob",
                          "emden_fowler.prob", "laplace.prob", "schwarzian.prob", "riccati.prob", "linear_a23.prob"})
        EXPECT_NO_THROW(load_problem(f)) << f;
}

TEST(Property, RenderParseRoundTrip) {
    std::mt19937_64 rng(2024);
    SymbolContext c = ctx_of({"x", "y"}, {"u"});
    std::vector<Expr> atoms = {P("x", c), P("y", c), P("u", c), P("u_x", c), P("u_xy", c)};
    for (int i = 0; i < 1000; ++i) {
        Expr e = random_expr(rng, atoms, 3);
        Expr back = P(render(e), c);
        EXPECT_EQ(normalize(back), normalize(e)) << render(e);
    }
}

TEST(Property, SubscriptPermutations) {
    SymbolContext c = ctx_of({"t", "x", "y"}, {"u"});
    for (std::string s : {"txyx", "xxy", "tyy", "txy", "yyyt"}) {
        std::sort(s.begin(), s.end());
        Expr first = P("u_" + s, c);
        do {
            EXPECT_EQ(P("u_" + s, c), first) << s;
        } while (std::next_permutation(s.begin(), s.end()));
    }
}
