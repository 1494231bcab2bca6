#include "cli.hpp"

#include "report_schema.hpp"
#include "schema_check.hpp"

#include "liesym/algebra.hpp"
#include "liesym/detsys.hpp"
#include "liesym/errors.hpp"
#include "liesym/expr_ops.hpp"
#include "liesym/invariants.hpp"
#include "liesym/parse.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace liesym::cli {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr std::uint64_t kDefaultSeed = 42;

struct Options {
    std::string command;
    bool json = false;
    bool verify = false;
    std::optional<std::uint64_t> seed;
    std::optional<int> degree;
    std::optional<std::string> profile;
    std::vector<std::string> extra;
    std::string file;
    std::vector<std::string> fields;
    std::optional<int> order;
    std::string method = "recursive";
    std::string f_expr, r_expr, s_expr, i_expr, j_expr, eps;
    std::string param;
    std::string mode = "exact";
    std::string v_name, w_name;
    std::vector<std::string> checks;
    std::vector<std::string> sub;
};

struct Report {
    std::string command;
    std::uint64_t seed = kDefaultSeed;
    std::string digest;
    json results = json::object();
    std::vector<std::string> warnings;
    bool probabilistic = false;
    std::ostringstream text;
};

std::string fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Everything a command needs from the problem file.
struct Context {
    ProblemSpec spec;
    std::string content;
    bool has_file = false;

    SymbolContext symbols() const { return spec.context(); }
    JetSpace space(int n = 0) const { return spec.space(n); }
};

std::vector<const NamedField*> select_fields(const Context& ctx, const std::vector<std::string>& names, std::size_t need = 0) {
    std::vector<const NamedField*> out;
    if (names.empty()) {
        for (const auto& f : ctx.spec.fields) out.push_back(&f);
    } else {
        for (const auto& n : names) {
            const NamedField* f = ctx.spec.field(n);
            if (!f) throw ValidationError("no vector field named '" + n + "'");
            out.push_back(f);
        }
    }
    if (out.empty()) throw ValidationError("the problem defines no vector fields");
    if (need && out.size() < need) throw ValidationError("need " + std::to_string(need) + " vector fields");
    if (need) out.resize(need);
    return out;
}

void note_probabilistic(Report& r, bool used) {
    if (!used || r.probabilistic) return;
    r.probabilistic = true;
    r.warnings.push_back("probabilistic equality used (" + std::to_string(kProbePoints) + " probe points, seed " +
                         std::to_string(r.seed) + ")");
}

std::string coeff_term(const Expr& c, const std::string& var) {
    std::string s = render(c);
    if (c.kind() == NodeKind::Sum) s = "(" + s + ")";
    return s + "@" + var;
}

int default_order(const Context& ctx) {
    if (ctx.spec.order) return *ctx.spec.order;
    int n = 0;
    for (const auto& e : ctx.spec.equations) n = std::max(n, differential_order(e.expr()));
    return n > 0 ? n : 2;
}

DiffSystem system_of(const Context& ctx) {
    if (ctx.spec.equations.empty()) throw ValidationError("the problem defines no equations");
    return DiffSystem::from_problem(ctx.spec);
}

void cmd_prolong(const Options& o, const Context& ctx, Report& r) {
    int n = o.order ? *o.order : default_order(ctx);
    if (n < 0) throw ValidationError("order must be non-negative");
    ProlongMethod m = ProlongMethod::Recursive;
    if (o.method == "direct") m = ProlongMethod::Direct;
    else if (o.method == "characteristic") m = ProlongMethod::Characteristic;
    else if (o.method != "recursive") throw ValidationError("unknown method " + o.method);
    JetSpace sp = ctx.space(n);
    r.results["order"] = n;
    r.results["method"] = o.method;
    r.results["verified"] = o.verify;
    json fields = json::array();
    for (const auto* f : select_fields(ctx, o.fields)) {
        ProlongedField pr = prolong(f->field, n, sp, m, o.verify);
        json entries = json::array();
        std::string line = render_field(f->field, sp);
        r.text << "pr^" << n << " " << f->name << " = ";
        for (const auto& e : pr.entries) {
            if (e.coeff.is_zero()) continue;
            Expr c = to_expr(e.coeff);
            entries.push_back({{"var", render(e.var)}, {"coefficient", render(c)}});
            std::string t = coeff_term(c, render(e.var));
            line += (line == "0" ? "" : " + ") + t;
        }
        r.text << line << "\n";
        for (const auto& e : entries)
            r.text << "  " << e["var"].get<std::string>() << ": " << e["coefficient"].get<std::string>() << "\n";
        fields.push_back({{"name", f->name}, {"field", render_field(f->field, sp)}, {"prolonged", entries}});
    }
    r.results["fields"] = fields;
}

void cmd_symmetries(const Options& o, const Context& ctx, Report& r) {
    DiffSystem sys = system_of(ctx);
    Ansatz a;
    std::string prof = o.profile ? *o.profile : ctx.spec.profile.value_or("generic");
    if (prof == "generic") a.profile = Profile::Generic;
    else if (prof == "quasilinear") a.profile = Profile::Quasilinear;
    else throw ValidationError("profile must be generic or quasilinear");
    a.degree = o.degree ? *o.degree : ctx.spec.degree.value_or(2);
    if (a.degree < 0) throw ValidationError("degree must be non-negative");
    a.extra = ctx.spec.extra_basis;
    for (const auto& e : o.extra) a.extra.push_back(parse_expression(e, ctx.symbols()));
    SymmetryBasis b = solve_symmetries(sys, a);
    json extra = json::array(), gens = json::array(), dens = json::array();
    for (const auto& e : a.extra) extra.push_back(render(e));
    for (const auto& d : b.denominators) dens.push_back(render(d));
    std::size_t structural = 0;
    r.text << "ansatz: " << profile_name(a.profile) << "(" << a.degree << ")";
    for (const auto& e : extra) r.text << ", extra " << e.get<std::string>();
    r.text << "\nunknowns: " << b.unknowns << ", equations: " << b.rows << "\n";
    r.text << "dimension: " << b.generators.size() << "\n";
    for (std::size_t i = 0; i < b.generators.size(); ++i) {
        const auto& g = b.generators[i];
        std::string s = render_field(g.field, sys.space);
        if (!g.superposition) structural++;
        gens.push_back({{"field", s}, {"superposition", g.superposition}});
        r.text << "  g" << i + 1 << " = " << s << (g.superposition ? "   [superposition]" : "") << "\n";
    }
    r.text << "structural: " << structural << ", superposition: " << b.generators.size() - structural << "\n";
    for (const auto& d : dens) r.text << "valid where " << d.get<std::string>() << " != 0\n";
    r.results["profile"] = profile_name(a.profile);
    r.results["degree"] = a.degree;
    r.results["extra_basis"] = extra;
    r.results["unknowns"] = b.unknowns;
    r.results["rows"] = b.rows;
    r.results["dimension"] = b.generators.size();
    r.results["structural_dimension"] = structural;
    r.results["generators"] = gens;
    r.results["denominators"] = dens;
    for (const auto& w : b.warnings) r.warnings.push_back(w);
}

void cmd_check(const Options& o, const Context& ctx, Report& r) {
    DiffSystem sys = system_of(ctx);
    json fields = json::array();
    for (const auto* f : select_fields(ctx, o.fields)) {
        if (o.verify) prolong(f->field, sys.space.n, sys.space, ProlongMethod::Recursive, true);
        CheckResult c = symmetry_check(f->field, sys);
        note_probabilistic(r, c.probabilistic);
        json lam = json::array(), res = json::array();
        for (const auto& l : c.lambda) lam.push_back(render(l));
        for (const auto& x : c.residual) res.push_back(render(x));
        r.text << f->name << ": " << verdict_name(c.verdict);
        if (c.verdict == Verdict::Relative)
            for (const auto& l : c.lambda) r.text << "  lambda = " << render(l);
        if (c.verdict == Verdict::Fail)
            for (const auto& x : c.residual) r.text << "  residual = " << render(x);
        r.text << "\n";
        fields.push_back({{"name", f->name},
                          {"field", render_field(f->field, sys.space)},
                          {"verdict", verdict_name(c.verdict)},
                          {"lambda", lam},
                          {"residual", res}});
    }
    r.results["fields"] = fields;
}

void cmd_bracket(const Options& o, const Context& ctx, Report& r) {
    auto fs = select_fields(ctx, o.fields, 2);
    JetSpace sp = ctx.space();
    VectorField b = bracket(fs[0]->field, fs[1]->field, sp);
    std::string s = render_field(b, sp);
    r.text << "[" << fs[0]->name << ", " << fs[1]->name << "] = " << s << "\n";
    r.results["fields"] = json::array({{{"name", fs[0]->name}, {"field", render_field(fs[0]->field, sp)}},
                                       {{"name", fs[1]->name}, {"field", render_field(fs[1]->field, sp)}}});
    r.results["bracket"] = s;
}

LieAlgebra algebra_of(const Options& o, const Context& ctx, json& basis) {
    std::vector<VectorField> fs;
    std::vector<std::string> names;
    basis = json::array();
    for (const auto* f : select_fields(ctx, o.fields)) {
        fs.push_back(f->field);
        names.push_back(f->name);
        basis.push_back({{"name", f->name}, {"field", render_field(f->field, ctx.space())}});
    }
    return structure_constants(fs, ctx.space(), names);
}

json table_json(const LieAlgebra& g) {
    json t = json::array();
    for (std::size_t i = 0; i < g.dim(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < g.dim(); ++j) row.push_back(render_combination(g.c[i][j], g.names));
        t.push_back(row);
    }
    return t;
}

void cmd_table(const Options& o, const Context& ctx, Report& r) {
    json basis;
    LieAlgebra g = algebra_of(o, ctx, basis);
    r.results["basis"] = basis;
    r.results["table"] = table_json(g);
    r.text << commutator_table(g);
}

std::vector<std::string> combos(const Subspace& s, const std::vector<std::string>& names) {
    std::vector<std::string> out;
    for (const auto& v : s) out.push_back(render_combination(v, names));
    return out;
}

void cmd_classify_algebra(const Options& o, const Context& ctx, Report& r) {
    json basis;
    LieAlgebra g = algebra_of(o, ctx, basis);
    DerivedSeries ds = derived_series(g);
    Subspace z = center(g);
    r.results["basis"] = basis;
    r.results["dimension"] = g.dim();
    r.results["table"] = table_json(g);
    r.results["derived_series"] = ds.dims();
    r.results["solvable"] = ds.solvable;
    r.results["center"] = combos(z, g.names);
    r.text << commutator_table(g);
    r.text << "dimension: " << g.dim() << "\nderived series dimensions:";
    for (auto d : ds.dims()) r.text << " " << d;
    r.text << "\nsolvable: " << (ds.solvable ? "yes" : "no") << "\ncenter: ";
    auto zc = combos(z, g.names);
    if (zc.empty()) r.text << "0";
    for (std::size_t i = 0; i < zc.size(); ++i) r.text << (i ? ", " : "") << zc[i];
    r.text << "\n";
}

void cmd_classify_2d(const Options& o, const Context& ctx, Report& r) {
    auto fs = select_fields(ctx, o.fields, 2);
    Classification2D c = classify_2d(fs[0]->field, fs[1]->field, ctx.space(), r.seed);
    std::string br = render_combination(c.bracket, {fs[0]->name, fs[1]->name});
    r.results["tag"] = realization_name(c.tag);
    r.results["abelian"] = c.abelian;
    r.results["connected"] = c.connected;
    r.results["rank"] = c.rank;
    r.results["bracket"] = br;
    r.text << realization_name(c.tag) << ": " << (c.abelian ? "abelian" : "nonabelian") << ", "
           << (c.connected ? "linearly connected" : "linearly unconnected") << " (rank " << c.rank << ")\n";
    r.text << "[" << fs[0]->name << ", " << fs[1]->name << "] = " << br << "\n";
}

void cmd_normalizer(const Options& o, const Context& ctx, Report& r) {
    json basis;
    LieAlgebra g = algebra_of(o, ctx, basis);
    if (o.sub.empty()) throw ValidationError("--sub needs at least one basis name");
    Subspace h;
    for (const auto& n : o.sub) {
        auto it = std::find(g.names.begin(), g.names.end(), n);
        if (it == g.names.end()) throw ValidationError("'" + n + "' is not a basis field");
        Vector v(g.dim(), Scalar(0));
        v[static_cast<std::size_t>(it - g.names.begin())] = 1;
        h.push_back(v);
    }
    Subspace nz = normalizer(g, h);
    auto hs = combos(span_basis(h, g.dim()), g.names), ns = combos(nz, g.names);
    r.results["basis"] = basis;
    r.results["subalgebra"] = hs;
    r.results["normalizer"] = ns;
    r.results["dimension"] = ns.size();
    r.text << "normalizer of {";
    for (std::size_t i = 0; i < hs.size(); ++i) r.text << (i ? ", " : "") << hs[i];
    r.text << "} = {";
    for (std::size_t i = 0; i < ns.size(); ++i) r.text << (i ? ", " : "") << ns[i];
    r.text << "}\n";
}

Vector basis_vector(const LieAlgebra& g, const std::string& name) {
    auto it = std::find(g.names.begin(), g.names.end(), name);
    if (it == g.names.end()) throw ValidationError("'" + name + "' is not a basis field");
    Vector v(g.dim(), Scalar(0));
    v[static_cast<std::size_t>(it - g.names.begin())] = 1;
    return v;
}

std::string format_double(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

void cmd_adjoint(const Options& o, const Context& ctx, Report& r) {
    json basis;
    LieAlgebra g = algebra_of(o, ctx, basis);
    if (o.v_name.empty() || o.w_name.empty()) throw ValidationError("adjoint needs --v and --w");
    Vector v = basis_vector(g, o.v_name), w = basis_vector(g, o.w_name);
    r.results["basis"] = basis;
    std::string combo;
    if (o.mode == "exact") {
        std::string p = o.param.empty() ? "eps" : o.param;
        Expr eps = Expr::symbol(p);
        AdjointResult a = adjoint_exact(g, v, w, eps);
        json cs = json::array();
        for (std::size_t i = 0; i < g.dim(); ++i) {
            cs.push_back(render(a.exact[i]));
            if (a.exact[i].is_zero()) continue;
            std::string c = render(a.exact[i]);
            std::string term = a.exact[i].is_one() ? g.names[i]
                               : (a.exact[i].kind() == NodeKind::Sum ? "(" + c + ")" : c) + "*" + g.names[i];
            combo += (combo.empty() ? "" : " + ") + term;
        }
        r.results["mode"] = "exact";
        r.results["coefficients"] = cs;
    } else if (o.mode == "numeric") {
        if (o.eps.empty()) throw ValidationError("numeric mode needs --eps");
        RatFun e = to_ratfun(parse_expression(o.eps, SymbolContext{}));
        if (!e.is_constant()) throw ValidationError("--eps must be a number");
        double eps = e.constant_value().get_d();
        AdjointResult a = adjoint_numeric(g, v, w, eps);
        json cs = json::array();
        for (std::size_t i = 0; i < g.dim(); ++i) {
            cs.push_back(a.numeric[i]);
            if (a.numeric[i] == 0.0) continue;
            double c = a.numeric[i];
            if (combo.empty()) combo = format_double(c);
            else combo += (c < 0 ? " - " : " + ") + format_double(std::abs(c));
            combo += "*" + g.names[i];
        }
        r.results["mode"] = "numeric";
        r.results["coefficients"] = cs;
    } else {
        throw ValidationError("mode must be exact or numeric");
    }
    if (combo.empty()) combo = "0";
    r.results["combination"] = combo;
    r.text << "Ad(exp(" << (o.mode == "exact" ? (o.param.empty() ? "eps" : o.param) : o.eps) << " " << o.v_name << ")) "
           << o.w_name << " = " << combo << "\n";
}

void cmd_invariants(const Options& o, const Context& ctx, Report& r) {
    std::vector<VectorField> fs;
    for (const auto* f : select_fields(ctx, o.fields)) fs.push_back(f->field);
    int top = o.order ? *o.order : ctx.spec.order.value_or(2);
    if (top < 0) throw ValidationError("order must be non-negative");
    json counts = json::array();
    for (int n = 0; n <= top; ++n) {
        InvariantCount c = invariant_count(fs, ctx.space(), n, r.seed);
        counts.push_back({{"order", n}, {"dimension", c.dimension}, {"rank", c.rank}, {"count", c.count}, {"seeds", c.seeds}, {"ranks", c.ranks}});
        r.text << "n=" << n << ": dim J^n = " << c.dimension << ", rank Z = " << c.rank << ", invariants k = " << c.count << "\n";
    }
    json checks = json::array();
    for (const auto& s : o.checks) {
        Expr e = parse_expression(s, ctx.symbols());
        int n = std::max(differential_order(e), 0);
        InvarianceResult res = is_invariant(fs, e, n, ctx.space());
        note_probabilistic(r, res.probabilistic);
        checks.push_back({{"expression", render(e)}, {"invariant", res.invariant}});
        r.text << render(e) << ": " << (res.invariant ? "invariant" : "not invariant") << "\n";
    }
    r.results["counts"] = counts;
    r.results["checks"] = checks;
}

void cmd_tresse(const Options& o, const Context& ctx, Report& r) {
    if (o.i_expr.empty() || o.j_expr.empty()) throw ValidationError("tresse needs --I and --J");
    Expr i = parse_expression(o.i_expr, ctx.symbols()), j = parse_expression(o.j_expr, ctx.symbols());
    Expr t = tresse_derivative(i, j, ctx.space());
    r.results["result"] = render(t);
    r.text << "D_x(" << render(j) << ") / D_x(" << render(i) << ") = " << render(t) << "\n";
}

void cmd_linearize(const Options& o, const Context& ctx, Report& r) {
    LinearizationVerdict v;
    std::string f_text;
    if (!o.f_expr.empty()) {
        SymbolContext c;
        c.independents = {"x"};
        c.dependents = {"y"};
        c.symbols = {"p"};
        Expr f = parse_expression(o.f_expr, c);
        f_text = render(f);
        v = linearization_test(f, Expr::symbol("x"), c.space().u(0), Expr::symbol("p"));
    } else {
        if (!ctx.has_file) throw ValidationError("linearize needs --f or a problem file");
        const auto& sp = ctx.spec;
        if (sp.independents.size() != 1 || sp.dependents.size() != 1 || sp.equations.size() != 1)
            throw ValidationError("linearize needs a single second order ODE");
        JetSpace js = ctx.space(2);
        Expr lead = js.var(0, {2});
        if (sp.equations[0].lead != lead) throw ValidationError("equation must be solved for the second derivative");
        Expr f = leading_solve(sp.equations[0].expr(), lead);
        f_text = render(f);
        v = linearization_test(f, js.x(0), js.u(0), js.var(0, {1}));
    }
    note_probabilistic(r, v.probabilistic);
    r.results["f"] = f_text;
    r.results["I1"] = render(v.i1);
    r.results["I2"] = render(v.i2);
    r.results["linearizable"] = v.linearizable;
    r.text << "f = " << f_text << "\nI1 = " << render(v.i1) << "\nI2 = " << render(v.i2) << "\n"
           << (v.linearizable ? "linearizable" : "not linearizable") << "\n";
}

void cmd_rectify(const Options& o, const Context& ctx, Report& r) {
    auto fs = select_fields(ctx, o.fields, 1);
    if (o.r_expr.empty() || o.s_expr.empty()) throw ValidationError("rectify-check needs --r and --s");
    Expr re = parse_expression(o.r_expr, ctx.symbols()), se = parse_expression(o.s_expr, ctx.symbols());
    bool prob = false;
    bool ok = rectify_check(fs[0]->field, re, se, ctx.space(), &prob);
    note_probabilistic(r, prob);
    Expr vr = lie_derivative(fs[0]->field, re, ctx.space()), vs = lie_derivative(fs[0]->field, se, ctx.space());
    r.results["fields"] = json::array({{{"name", fs[0]->name}, {"field", render_field(fs[0]->field, ctx.space())}}});
    r.results["rectifies"] = ok;
    r.results["v_r"] = render(vr);
    r.results["v_s"] = render(vs);
    r.text << fs[0]->name << "(r) = " << render(vr) << ", " << fs[0]->name << "(s) = " << render(vs) << "\n"
           << (ok ? "rectifying" : "not rectifying") << "\n";
}

void cmd_flow(const Options& o, const Context& ctx, Report& r) {
    auto fs = select_fields(ctx, o.fields, 1);
    if (o.f_expr.empty()) throw ValidationError("flow-series needs --f");
    std::string p = o.param.empty() ? "t" : o.param;
    SymbolContext c = ctx.symbols();
    c.symbols.push_back(p);
    Expr f = parse_expression(o.f_expr, c);
    int n = o.order ? *o.order : 3;
    if (n < 0) throw ValidationError("order must be non-negative");
    Expr s = flow_series(fs[0]->field, f, Expr::symbol(p), n, ctx.space());
    r.results["fields"] = json::array({{{"name", fs[0]->name}, {"field", render_field(fs[0]->field, ctx.space())}}});
    r.results["order"] = n;
    r.results["series"] = render(s);
    r.text << "exp(" << p << " " << fs[0]->name << ") " << render(f) << " = " << render(s) << " + O(" << p << "^" << n + 1 << ")\n";
}

json report_json(const Report& r) {
    return json{{"command", r.command},
                {"schema_version", kSchemaVersion},
                {"seed", r.seed},
                {"inputs_digest", r.digest},
                {"probabilistic", r.probabilistic},
                {"warnings", r.warnings},
                {"results", r.results}};
}

int fail(std::ostream& err, int code, const std::string& what, const std::string& msg) {
    err << "liesym: " << what << ": " << msg << "\n";
    return code;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Lie point symmetries of differential equations", "liesym"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.add_flag("--json", o.json, "machine-readable report");
    app.add_option("--seed", o.seed, "seed for generic points and probes (default 42)");
    app.add_flag("--verify", o.verify, "run all three prolongation formulas and compare");

    struct Sub {
        const char* name;
        const char* help;
        bool needs_file;
    };
    const std::vector<Sub> subs = {
        {"prolong", "prolong vector fields", true},
        {"symmetries", "solve for symmetries within an ansatz", true},
        {"check", "check vector fields against the equations", true},
        {"bracket", "Lie bracket of two fields", true},
        {"table", "commutator table of the fields", true},
        {"classify-algebra", "derived series, solvability and center", true},
        {"classify-2d", "canonical type of a two-dimensional algebra", true},
        {"normalizer", "normalizer of a subalgebra", true},
        {"adjoint", "adjoint action Ad(exp(eps v)) w", true},
        {"invariants", "count and check differential invariants", true},
        {"tresse", "Tresse derivative of two invariants", true},
        {"linearize", "Tresse linearization test for y'' = f(x,y,p)", false},
        {"rectify-check", "verify rectifying coordinates", true},
        {"flow-series", "truncated Lie series of the flow", true},
    };
    for (const auto& s : subs) {
        CLI::App* sc = app.add_subcommand(s.name, s.help);
        auto* file = sc->add_option("file", o.file, "problem file");
        if (s.needs_file) file->required();
        sc->add_option("--fields", o.fields, "vector field names");
        std::string n = s.name;
        if (n == "prolong" || n == "invariants" || n == "flow-series") sc->add_option("--order", o.order, "order");
        if (n == "prolong") sc->add_option("--method", o.method, "recursive, direct or characteristic");
        if (n == "symmetries") {
            sc->add_option("--degree", o.degree, "ansatz degree");
            sc->add_option("--profile", o.profile, "generic or quasilinear");
            sc->add_option("--extra-basis", o.extra, "extra basis function");
        }
        if (n == "normalizer") sc->add_option("--sub", o.sub, "basis names spanning the subalgebra");
        if (n == "adjoint") {
            sc->add_option("--v", o.v_name, "acting basis field");
            sc->add_option("--w", o.w_name, "transformed basis field");
            sc->add_option("--mode", o.mode, "exact or numeric");
            sc->add_option("--eps", o.eps, "parameter value (numeric mode)");
            sc->add_option("--param", o.param, "parameter name (exact mode)");
        }
        if (n == "invariants") sc->add_option("--check", o.checks, "expression to test for invariance");
        if (n == "tresse") {
            sc->add_option("--I", o.i_expr, "invariant I");
            sc->add_option("--J", o.j_expr, "invariant J");
        }
        if (n == "linearize" || n == "flow-series") sc->add_option("--f", o.f_expr, "expression");
        if (n == "flow-series") sc->add_option("--param", o.param, "flow parameter name");
        if (n == "rectify-check") {
            sc->add_option("--r", o.r_expr, "invariant coordinate r");
            sc->add_option("--s", o.s_expr, "coordinate s");
        }
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInput;
    }
    o.command = app.get_subcommands().front()->get_name();

    auto started = std::chrono::steady_clock::now();
    Report r;
    r.command = o.command;
    try {
        Context ctx;
        if (!o.file.empty()) {
            ctx.content = read_file(o.file);
            ctx.spec = parse_problem(ctx.content);
            ctx.has_file = true;
        }
        r.seed = o.seed ? *o.seed : ctx.spec.seed.value_or(kDefaultSeed);
        set_probe_seed(r.seed);
        std::string digest_input = o.command + '\0' + ctx.content;
        for (const auto& a : args)
            if (a != o.file && a != "--json") digest_input += '\0' + a;
        r.digest = fnv1a(digest_input);

        const std::string& c = o.command;
        if (c == "prolong") cmd_prolong(o, ctx, r);
        else if (c == "symmetries") cmd_symmetries(o, ctx, r);
        else if (c == "check") cmd_check(o, ctx, r);
        else if (c == "bracket") cmd_bracket(o, ctx, r);
        else if (c == "table") cmd_table(o, ctx, r);
        else if (c == "classify-algebra") cmd_classify_algebra(o, ctx, r);
        else if (c == "classify-2d") cmd_classify_2d(o, ctx, r);
        else if (c == "normalizer") cmd_normalizer(o, ctx, r);
        else if (c == "adjoint") cmd_adjoint(o, ctx, r);
        else if (c == "invariants") cmd_invariants(o, ctx, r);
        else if (c == "tresse") cmd_tresse(o, ctx, r);
        else if (c == "linearize") cmd_linearize(o, ctx, r);
        else if (c == "rectify-check") cmd_rectify(o, ctx, r);
        else if (c == "flow-series") cmd_flow(o, ctx, r);
    } catch (const ParseError& e) {
        return fail(err, kInput, "parse error", e.what());
    } catch (const Error& e) {
        const std::string& k = e.kind();
        if (k == "UnknownIdentifier" || k == "ValidationError" || k == "NonAffineLeading" ||
            k == "ZeroLeadingCoefficient" || k == "OrderMismatch" || k == "CyclicBinding")
            return fail(err, kInput, k, e.what());
        if (k == "InternalError") return fail(err, kInternal, k, e.what());
        return fail(err, kComputational, k, e.what());
    } catch (const std::exception& e) {
        return fail(err, kInternal, "internal error", e.what());
    }

    if (o.json) {
        json doc = report_json(r);
        auto problems = validate(json::parse(kReportSchema), doc);
        if (!problems.empty()) return fail(err, kInternal, "report fails its schema", problems.front());
        out << doc.dump(2) << "\n";
    } else {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        out << "liesym " << r.command << "  (seed " << r.seed << ", digest " << r.digest << ")\n";
        out << r.text.str();
        for (const auto& w : r.warnings) out << "warning: " << w << "\n";
        out << "time: " << std::fixed << std::setprecision(3) << secs << " s\n";
    }
    return kOk;
}

} // namespace liesym::cli
