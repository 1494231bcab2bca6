#include "support.hpp"

#include <gtest/gtest.h>

using namespace liesym;
using namespace liesym::test;

TEST(Jet, Dimension) {
    EXPECT_EQ(jet_dimension(1, 1, 2), 4);
    EXPECT_EQ(jet_dimension(1, 1, 0), 2);
    EXPECT_EQ(jet_dimension(2, 1, 1), 5);
    JetSpace sp{{"t", "x"}, {"u"}, 3};
    EXPECT_EQ(sp.dimension(), static_cast<long>(sp.coordinates().size()));
}

TEST(Jet, MultiIndicesGradedLex) {
    JetSpace sp{{"t", "x"}, {"u"}, 2};
    auto m = sp.multi_indices(2);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m[0], (std::vector<int>{2, 0}));
    EXPECT_EQ(m[2], (std::vector<int>{0, 2}));
}

TEST(Jet, TotalDerivative) {
    SymbolContext tx = ctx_of({"t", "x"}, {"u"});
    JetSpace sp = tx.space(2);
    EXPECT_EQ(total_derivative(P("u", tx), 1, sp), P("u_x", tx));
    EXPECT_TRUE(same(total_derivative(P("x*u_x", tx), 1, sp), P("u_x + x*u_xx", tx)));
    EXPECT_EQ(total_derivative(P("u_x", tx), 0, sp), P("u_tx", tx));
}

TEST(Jet, TotalDerivativeOfOpaqueFunction) {
    SymbolContext c = ctx_of({"x"}, {"u"});
    c.functions = {"F"};
    JetSpace sp = c.space(1);
    Expr d = total_derivative(P("F(x, u)", c), 0, sp);
    EXPECT_TRUE(same(d, P("F{1,0}(x,u) + u_x*F{0,1}(x,u)", c)));
}

TEST(Jet, DifferentialOrder) {
    SymbolContext c = ctx_of({"x"}, {"u"});
    EXPECT_EQ(differential_order(P("u_xx + u", c)), 2);
    EXPECT_EQ(differential_order(P("x^2", c)), 0);
    SymbolContext cy = ctx_of({"x"}, {"y"});
    EXPECT_EQ(differential_order(P("(1+y_x^2)^(-3/2)*y_xx", cy)), 2);
}

TEST(Jet, GenericPoint) {
    JetSpace sp{{"x"}, {"y"}, 3};
    auto a = generic_point(sp, 1), b = generic_point(sp, 1), c = generic_point(sp, 2);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_EQ(a.size(), static_cast<std::size_t>(sp.dimension()));
    for (const auto& [k, v] : a) EXPECT_NE(v, 0) << k;
}
