#include "support.hpp"

#include "liesym/errors.hpp"

#include <gtest/gtest.h>

using namespace liesym;
using namespace liesym::test;

namespace {

DiffSystem system_from(const std::string& file) { return DiffSystem::from_problem(load_problem(file)); }

Ansatz ansatz(Profile p, int degree) {
    Ansatz a;
    a.profile = p;
    a.degree = degree;
    return a;
}

} // namespace

TEST(LeadingSolve, Examples) {
    SymbolContext tx = ctx_of({"t", "x"}, {"u"}), xy = ctx_of({"x"}, {"y"});
    EXPECT_TRUE(same(leading_solve(P("u_t - x*u_xx - 5*u_x", tx), P("u_xx", tx)), P("(u_t - 5*u_x)/x", tx)));
    EXPECT_TRUE(same(leading_solve(P("y_xx + 3*y*y_x + y^3", xy), P("y_xx", xy)), P("-3*y*y_x - y^3", xy)));
    EXPECT_THROW(leading_solve(P("y_xx^2 - y", xy), P("y_xx", xy)), NonAffineLeading);
    EXPECT_THROW(leading_solve(P("x*y", xy), P("y_xx", xy)), ZeroLeadingCoefficient);
}

TEST(OnShell, ReplacesDerivativesOfLead) {
    DiffSystem sys = system_from("heat.prob");
    SymbolContext tx = ctx_of({"t", "x"}, {"u"});
    RatFun r = sys.on_shell(to_ratfun(P("u_xxx - u_tx", tx)));
    EXPECT_TRUE(r.is_zero());
}

TEST(DeterminingSystem, FirstOrderOde) {
    SymbolContext c = ctx_of({"x"}, {"y"});
    c.functions = {"F"};
    JetSpace sp = c.space(1);
    DiffSystem sys = DiffSystem::make(sp, {{P("y_x - F(x,y)", c), P("y_x", c)}});
    DeterminingSystem ds = determining_system(sys);
    ASSERT_EQ(ds.residuals.size(), 1u);
    SymbolContext k = c;
    k.functions = {"F", "xi_x", "phi_y"};
    Expr expected = P("phi_y{1,0}(x,y) + (phi_y{0,1}(x,y) - xi_x{1,0}(x,y))*F(x,y) - xi_x{0,1}(x,y)*F(x,y)^2"
                      " - xi_x(x,y)*F{1,0}(x,y) - phi_y(x,y)*F{0,1}(x,y)",
                      k);
    Expr ratio = normalize(ds.residuals[0] / expected);
    EXPECT_TRUE(ratio.is_scalar()) << render(ds.residuals[0]);
}

TEST(Check, Verdicts) {
    SymbolContext tx = ctx_of({"t", "x"}, {"u"});
    DiffSystem heat = system_from("heat.prob");
    CheckResult bad = symmetry_check(F("x @x", tx), heat);
    EXPECT_EQ(bad.verdict, Verdict::Fail);
    ASSERT_EQ(bad.residual.size(), 1u);
    EXPECT_TRUE(same(bad.residual[0], P("2*u_xx", tx)) || same(bad.residual[0], P("2*u_t", tx)));
    EXPECT_EQ(symmetry_check(F("@t", tx), heat).verdict, Verdict::Exact);

    SymbolContext xy = ctx_of({"x", "y"}, {"u"});
    CheckResult lap = symmetry_check(load_problem("laplace.prob").field("conformal")->field, system_from("laplace.prob"));
    EXPECT_EQ(lap.verdict, Verdict::Relative);
    EXPECT_TRUE(same(lap.lambda[0], P("-4*x", xy)));
}

TEST(Symmetries, FreeParticle) {
    SymmetryBasis b = solve_symmetries(system_from("free_particle.prob"), ansatz(Profile::Generic, 2));
    EXPECT_EQ(b.generators.size(), 8u);
    EXPECT_TRUE(b.warnings.empty());
}

TEST(Symmetries, EmdenFowler) {
    ProblemSpec s = load_problem("emden_fowler.prob");
    SymmetryBasis b = solve_symmetries(DiffSystem::from_problem(s), ansatz(Profile::Generic, 2));
    ASSERT_EQ(b.generators.size(), 2u);
    for (const auto& f : s.fields) EXPECT_TRUE(in_span(b.fields(), f.field)) << f.name;
}

TEST(Symmetries, DriftDiffusionStructuralPart) {
    ProblemSpec s = load_problem("drift_diffusion.prob");
    SymmetryBasis b = solve_symmetries(DiffSystem::from_problem(s), ansatz(Profile::Quasilinear, 2));
    EXPECT_EQ(b.structural().size(), 4u);
    for (const auto& f : s.fields) EXPECT_TRUE(in_span(b.fields(), f.field)) << f.name;
    // tau depends on t alone, xi is free of u
    SymbolContext tx = ctx_of({"t", "x"}, {"u"});
    for (const auto& g : b.fields()) {
        EXPECT_TRUE(differentiate(g.xi[0], P("x", tx)).is_zero());
        EXPECT_TRUE(differentiate(g.xi[0], P("u", tx)).is_zero());
        EXPECT_TRUE(differentiate(g.xi[1], P("u", tx)).is_zero());
        EXPECT_TRUE(normalize(differentiate(differentiate(g.phi[0], P("u", tx)), P("u", tx))).is_zero());
    }
}

TEST(Symmetries, NoSymmetriesWarns) {
    SymbolContext c = ctx_of({"x"}, {"y"});
    DiffSystem sys = DiffSystem::make(c.space(2), {{P("y_xx - exp(y) - x^7*y_x^5", c), P("y_xx", c)}});
    SymmetryBasis b = solve_symmetries(sys, ansatz(Profile::Generic, 1));
    EXPECT_TRUE(b.generators.empty());
    ASSERT_FALSE(b.warnings.empty());
}

TEST(Property, AnsatzAndDeterminingSystemAgree) {
    for (auto [file, prof, deg] : {std::tuple{"free_particle.prob", Profile::Generic, 2},
                                   std::tuple{"emden_fowler.prob", Profile::Generic, 2},
                                   std::tuple{"heat.prob", Profile::Quasilinear, 2}}) {
        DiffSystem sys = system_from(file);
        SymmetryBasis a = solve_symmetries(sys, ansatz(prof, deg));
        SymmetryBasis d = solve_determining_system(sys, determining_system(sys), ansatz(prof, deg));
        ASSERT_EQ(a.generators.size(), d.generators.size()) << file;
        for (std::size_t i = 0; i < a.generators.size(); ++i)
            EXPECT_TRUE(fields_equal(a.generators[i].field, d.generators[i].field)) << file;
    }
}

TEST(Property, DimensionGrowsWithDegree) {
    for (auto [file, prof] : {std::pair{"free_particle.prob", Profile::Generic}, std::pair{"heat.prob", Profile::Quasilinear}}) {
        DiffSystem sys = system_from(file);
        std::vector<VectorField> prev;
        for (int d = 0; d <= 3; ++d) {
            auto cur = solve_symmetries(sys, ansatz(prof, d)).fields();
            EXPECT_GE(cur.size(), prev.size()) << file << " degree " << d;
            for (const auto& f : prev) EXPECT_TRUE(in_span(cur, f)) << file << " degree " << d;
            prev = cur;
        }
    }
}

TEST(Property, EveryGeneratorChecks) {
    DiffSystem sys = system_from("riccati.prob");
    SymmetryBasis b = solve_symmetries(sys, ansatz(Profile::Generic, 3));
    EXPECT_GE(b.generators.size(), 2u);
    for (const auto& g : b.generators) EXPECT_NE(symmetry_check(g.field, sys).verdict, Verdict::Fail);
}
