#include "liesym/parse.hpp"

#include "liesym/errors.hpp"
#include "liesym/expr_ops.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace liesym {

namespace {

enum class Tok { Num, Ident, Op, At, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int col = 1;  // 1-based column inside the line
};

class Lexer {
public:
    Lexer(const std::string& src, int line, int col0) : src_(src), line_(line), col0_(col0) { advance(); }

    const Token& peek() const { return cur_; }

    Token next() {
        Token t = cur_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        std::string tok = t.kind == Tok::End ? "<end of input>" : t.text;
        throw ParseError(line_, t.col, tok,
                         "line " + std::to_string(line_) + ", column " + std::to_string(t.col) + ": " + msg + " near '" + tok + "'");
    }

    int line() const { return line_; }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        cur_ = Token{};
        cur_.col = col0_ + static_cast<int>(pos_);
        if (pos_ >= src_.size()) {
            cur_.kind = Tok::End;
            return;
        }
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            std::size_t s = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
            cur_.kind = Tok::Num;
            cur_.text = src_.substr(s, pos_ - s);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t s = pos_;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
            if (src_.compare(pos_, 2, "[[") == 0) {
                std::size_t e = src_.find("]]", pos_);
                if (e == std::string::npos) {
                    cur_.kind = Tok::Ident;
                    cur_.text = src_.substr(s);
                    fail(cur_, "unterminated [[ index");
                }
                pos_ = e + 2;
            }
            cur_.kind = Tok::Ident;
            cur_.text = src_.substr(s, pos_ - s);
            return;
        }
        if (c == '@') {
            std::size_t s = pos_++;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
            cur_.kind = Tok::At;
            cur_.text = src_.substr(s, pos_ - s);
            return;
        }
        if (std::string("+-*/^(),{}").find(c) != std::string::npos) {
            ++pos_;
            cur_.kind = Tok::Op;
            cur_.text = std::string(1, c);
            return;
        }
        cur_.kind = Tok::Op;
        cur_.text = std::string(1, c);
        fail(cur_, "unexpected character");
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_;
    int col0_;
    Token cur_;
};

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

Scalar number_value(const std::string& t) {
    auto dot = t.find('.');
    if (dot == std::string::npos) return parse_scalar(t);
    std::string whole = t.substr(0, dot), frac = t.substr(dot + 1);
    Integer num(whole.empty() ? "0" : whole);
    Integer den(1);
    for (char c : frac) {
        num = num * 10 + (c - '0');
        den *= 10;
    }
    Scalar s(num, den);
    s.canonicalize();
    return s;
}

class Parser {
public:
    Parser(const std::string& src, const SymbolContext& ctx, int line, int col0) : lex_(src, line, col0), ctx_(ctx) {}

    Expr parse_all() {
        Expr e = expr();
        if (lex_.peek().kind != Tok::End) lex_.fail(lex_.peek(), "unexpected token");
        return e;
    }

private:
    bool at_op(const char* op) const { return lex_.peek().kind == Tok::Op && lex_.peek().text == op; }

    void expect(const char* op) {
        if (!at_op(op)) lex_.fail(lex_.peek(), std::string("expected '") + op + "'");
        lex_.next();
    }

    Expr expr() {
        std::vector<Expr> terms{term()};
        while (at_op("+") || at_op("-")) {
            bool minus = lex_.next().text == "-";
            Expr t = term();
            terms.push_back(minus ? -t : t);
        }
        return Expr::sum(std::move(terms));
    }

    Expr term() {
        Expr acc = unary();
        while (true) {
            if (at_op("*")) {
                lex_.next();
                acc = acc * unary();
            } else if (at_op("/")) {
                Token t = lex_.next();
                Expr d = unary();
                if (d.is_zero()) lex_.fail(t, "division by zero");
                acc = acc / d;
            } else if (lex_.peek().kind == Tok::At) {
                acc = acc * unary();
            } else {
                return acc;
            }
        }
    }

    Expr unary() {
        if (at_op("-")) {
            lex_.next();
            return -unary();
        }
        if (at_op("+")) {
            lex_.next();
            return unary();
        }
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (!at_op("^")) return base;
        lex_.next();
        Token start = lex_.peek();
        Expr ex = unary();
        RatFun r = to_ratfun(ex);
        if (!r.is_constant()) lex_.fail(start, "exponent must be a rational constant");
        Scalar e = r.constant_value();
        try {
            return Expr::power(base, e);
        } catch (const DivisionByZero&) {
            lex_.fail(start, "zero raised to a negative power");
        }
    }

    std::vector<Expr> arglist() {
        expect("(");
        std::vector<Expr> args;
        if (at_op(")")) lex_.fail(lex_.peek(), "empty argument list");
        args.push_back(expr());
        while (at_op(",")) {
            lex_.next();
            args.push_back(expr());
        }
        expect(")");
        return args;
    }

    Expr primary() {
        Token t = lex_.peek();
        switch (t.kind) {
        case Tok::Num:
            lex_.next();
            return Expr(number_value(t.text));
        case Tok::At: {
            lex_.next();
            if (!ctx_.allow_field_markers) lex_.fail(t, "'@' is only allowed in vector fields");
            std::string name = t.text.substr(1);
            if (!contains(ctx_.independents, name) && !contains(ctx_.dependents, name))
                lex_.fail(t, "'@" + name + "' is not a base coordinate");
            return Expr::symbol(t.text);
        }
        case Tok::Op:
            if (t.text == "(") {
                lex_.next();
                Expr e = expr();
                expect(")");
                return e;
            }
            lex_.fail(t, "unexpected operator");
        case Tok::End: lex_.fail(t, "unexpected end of input");
        case Tok::Ident: break;
        }
        lex_.next();
        const std::string& id = t.text;
        if (contains(ctx_.independents, id)) return Expr::symbol(id);
        if (contains(ctx_.dependents, id))
            return Expr::jet(id, std::vector<int>(ctx_.independents.size(), 0), ctx_.independents);
        if (contains(ctx_.symbols, id)) return Expr::symbol(id);
        static const std::vector<std::pair<std::string, KernelKind>> kernels = {
            {"exp", KernelKind::Exp}, {"ln", KernelKind::Ln}, {"sin", KernelKind::Sin},
            {"cos", KernelKind::Cos}, {"arctan", KernelKind::Arctan}};
        for (const auto& [name, k] : kernels) {
            if (id != name) continue;
            auto args = arglist();
            if (args.size() != 1) lex_.fail(t, name + " takes one argument");
            return Expr::kernel(k, args[0]);
        }
        if (id == "sqrt") {
            auto args = arglist();
            if (args.size() != 1) lex_.fail(t, "sqrt takes one argument");
            return Expr::power(args[0], Scalar(1, 2));
        }
        if (contains(ctx_.functions, id)) {
            std::vector<int> index;
            if (at_op("{")) {
                lex_.next();
                while (true) {
                    Token n = lex_.next();
                    if (n.kind != Tok::Num || n.text.find('.') != std::string::npos) lex_.fail(n, "expected a derivative count");
                    index.push_back(std::stoi(n.text));
                    if (at_op("}")) break;
                    expect(",");
                }
                expect("}");
            }
            auto args = arglist();
            if (!index.empty() && index.size() != args.size()) lex_.fail(t, "derivative index does not match the argument count");
            return Expr::funcsym(id, args, index);
        }
        if (auto j = jet_variable(id, t)) return *j;
        throw UnknownIdentifier("line " + std::to_string(lex_.line()) + ", column " + std::to_string(t.col) +
                                ": unknown identifier '" + id + "'");
    }

    std::optional<Expr> jet_variable(const std::string& id, const Token& t) {
        const auto& indep = ctx_.independents;
        auto br = id.find("[[");
        if (br != std::string::npos) {
            std::string dep = id.substr(0, br);
            if (!contains(ctx_.dependents, dep)) return std::nullopt;
            std::string body = id.substr(br + 2, id.size() - br - 4);
            std::vector<int> counts(indep.size(), 0);
            std::stringstream ss(body);
            std::string item;
            while (std::getline(ss, item, ',')) {
                int k = 0;
                try {
                    k = std::stoi(item);
                } catch (...) {
                    lex_.fail(t, "bad derivative index");
                }
                if (k < 1 || k > static_cast<int>(indep.size())) lex_.fail(t, "derivative index out of range");
                counts[static_cast<std::size_t>(k - 1)]++;
            }
            return Expr::jet(dep, counts, indep);
        }
        auto us = id.find('_');
        if (us == std::string::npos) return std::nullopt;
        std::string dep = id.substr(0, us), sub = id.substr(us + 1);
        if (!contains(ctx_.dependents, dep) || sub.empty()) return std::nullopt;
        std::vector<int> counts(indep.size(), 0);
        for (char c : sub) {
            bool found = false;
            for (std::size_t i = 0; i < indep.size(); ++i)
                if (indep[i].size() == 1 && indep[i][0] == c) {
                    counts[i]++;
                    found = true;
                }
            if (!found) return std::nullopt;
        }
        return Expr::jet(dep, counts, indep);
    }

    Lexer lex_;
    const SymbolContext& ctx_;
};

Expr parse_at(const std::string& src, const SymbolContext& ctx, int line, int col0) {
    Parser p(src, ctx, line, col0);
    return p.parse_all();
}

VectorField field_at(const std::string& src, const SymbolContext& ctx, int line, int col0) {
    SymbolContext c = ctx;
    c.allow_field_markers = true;
    Expr e = parse_at(src, c, line, col0);
    std::vector<std::string> names = ctx.independents;
    names.insert(names.end(), ctx.dependents.begin(), ctx.dependents.end());
    std::vector<Expr> markers;
    for (const auto& n : names) markers.push_back(Expr::symbol("@" + n));
    MonomialMap mm;
    try {
        mm = collect_coefficients(e, markers);
    } catch (const NotPolynomial&) {
        throw ParseError(line, col0, src, "line " + std::to_string(line) + ": vector field must be linear in the @ markers");
    }
    VectorField v;
    v.xi.assign(ctx.independents.size(), Expr(0));
    v.phi.assign(ctx.dependents.size(), Expr(0));
    for (const auto& [exps, c] : mm.terms) {
        int total = 0, which = -1;
        for (std::size_t k = 0; k < exps.size(); ++k) {
            total += exps[k];
            if (exps[k]) which = static_cast<int>(k);
        }
        if (total != 1)
            throw ParseError(line, col0, src, "line " + std::to_string(line) + ": vector field must be linear in the @ markers");
        std::size_t k = static_cast<std::size_t>(which);
        if (k < v.xi.size())
            v.xi[k] = c;
        else
            v.phi[k - v.xi.size()] = c;
    }
    for (std::size_t k = 0; k < v.size(); ++k)
        if (differential_order(v.coeff(k)) > 0)
            throw ValidationError("line " + std::to_string(line) + ": vector field coefficients may not contain derivatives");
    return v;
}

} // namespace

Expr parse_expression(const std::string& src, const SymbolContext& ctx) { return parse_at(src, ctx, 1, 1); }

VectorField parse_vector_field(const std::string& src, const SymbolContext& ctx) { return field_at(src, ctx, 1, 1); }

SymbolContext ProblemSpec::context() const {
    SymbolContext c;
    c.independents = independents;
    c.dependents = dependents;
    c.functions = functions;
    return c;
}

const NamedField* ProblemSpec::field(const std::string& name) const {
    for (const auto& f : fields)
        if (f.name == name) return &f;
    return nullptr;
}

namespace {

std::vector<std::string> words(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
}

bool valid_name(const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

// position of a whole word at parenthesis depth zero, or npos
std::size_t find_word(const std::string& s, const std::string& w, std::size_t from) {
    int depth = 0;
    for (std::size_t i = from; i < s.size(); ++i) {
        if (s[i] == '(') depth++;
        if (s[i] == ')') depth--;
        if (depth || s.compare(i, w.size(), w) != 0) continue;
        bool left = i == 0 || std::isspace(static_cast<unsigned char>(s[i - 1]));
        bool right = i + w.size() == s.size() || std::isspace(static_cast<unsigned char>(s[i + w.size()]));
        if (left && right) return i;
    }
    return std::string::npos;
}

[[noreturn]] void line_error(int line, const std::string& msg) {
    throw ValidationError("line " + std::to_string(line) + ": " + msg);
}

} // namespace

ProblemSpec parse_problem(const std::string& src) {
    ProblemSpec spec;
    std::set<std::string> names;
    auto declare = [&](const std::string& n, int line) {
        if (!valid_name(n)) line_error(line, "invalid name '" + n + "'");
        if (!names.insert(n).second) line_error(line, "name '" + n + "' declared twice");
    };
    std::stringstream in(src);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string text = raw;
        auto hash = text.find('#');
        if (hash != std::string::npos) text = text.substr(0, hash);
        auto ws = words(text);
        if (ws.empty()) continue;
        const std::string& kw = ws[0];
        std::size_t kwpos = text.find(kw);
        std::size_t rest = kwpos + kw.size();
        if (kw == "vars" || kw == "unknowns" || kw == "function" || kw == "functions") {
            if (ws.size() < 2) line_error(line, kw + " needs at least one name");
            for (std::size_t i = 1; i < ws.size(); ++i) {
                declare(ws[i], line);
                if (kw == "vars")
                    spec.independents.push_back(ws[i]);
                else if (kw == "unknowns")
                    spec.dependents.push_back(ws[i]);
                else
                    spec.functions.push_back(ws[i]);
            }
        } else if (kw == "equation") {
            EquationSpec eq;
            std::string body = text.substr(rest);
            std::size_t lead = find_word(body, "leading", 0);
            std::string lead_text;
            if (lead != std::string::npos) {
                lead_text = body.substr(lead + 7);
                body = body.substr(0, lead);
            }
            auto eqpos = body.find('=');
            SymbolContext ctx = spec.context();
            int col = static_cast<int>(rest) + 1;
            if (eqpos == std::string::npos) {
                eq.lhs = parse_at(body, ctx, line, col);
                eq.rhs = Expr(0);
            } else {
                if (body.find('=', eqpos + 1) != std::string::npos) line_error(line, "more than one '='");
                eq.lhs = parse_at(body.substr(0, eqpos), ctx, line, col);
                eq.rhs = parse_at(body.substr(eqpos + 1), ctx, line, col + static_cast<int>(eqpos) + 1);
            }
            eq.text = text.substr(rest);
            RatFun e = to_ratfun(eq.expr());
            if (e.is_zero()) line_error(line, "equation is identically zero");
            JetSpace space = spec.space();
            if (!lead_text.empty()) {
                int lcol = col + static_cast<int>(lead) + 8;
                eq.lead = parse_at(lead_text, ctx, line, lcol);
                if (eq.lead.kind() != NodeKind::Symbol || !jet_coord(eq.lead.sym(), space) || eq.lead.sym().order() == 0)
                    line_error(line, "leading term must be a derivative of an unknown");
                if (!depends_on(e, eq.lead.sym().atom_id))
                    line_error(line, "leading derivative " + eq.lead.name() + " does not occur in the equation");
            } else {
                // highest order derivative present, first in canonical order
                int best = 0;
                for (int s : symbol_atoms(e)) {
                    const SymbolInfo& info = *atom(s).sym;
                    auto jc = jet_coord(info, space);
                    if (!jc || info.order() == 0) continue;
                    if (info.order() > best || (info.order() == best && compare_atoms(s, eq.lead.sym().atom_id) < 0)) {
                        best = info.order();
                        eq.lead = atom(s).tree;
                    }
                }
                if (best == 0) line_error(line, "equation contains no derivatives");
            }
            spec.equations.push_back(eq);
        } else if (kw == "vf") {
            std::string body = text.substr(rest);
            auto eqpos = body.find('=');
            if (eqpos == std::string::npos) line_error(line, "expected 'vf NAME = field'");
            auto nm = words(body.substr(0, eqpos));
            if (nm.size() != 1 || !valid_name(nm[0])) line_error(line, "bad vector field name");
            if (spec.field(nm[0])) line_error(line, "vector field '" + nm[0] + "' defined twice");
            NamedField f;
            f.name = nm[0];
            f.text = body.substr(eqpos + 1);
            f.field = field_at(f.text, spec.context(), line, static_cast<int>(rest + eqpos) + 2);
            spec.fields.push_back(f);
        } else if (kw == "option") {
            if (ws.size() < 3) line_error(line, "expected 'option KEY VALUE'");
            const std::string& key = ws[1];
            std::size_t vpos = text.find(key, rest) + key.size();
            std::string value = text.substr(vpos);
            value.erase(0, value.find_first_not_of(" \t"));
            value.erase(value.find_last_not_of(" \t\r") + 1);
            try {
                if (key == "seed") {
                    spec.seed = std::stoull(value);
                } else if (key == "degree") {
                    int d = std::stoi(value);
                    if (d < 0) line_error(line, "degree must be non-negative");
                    spec.degree = d;
                } else if (key == "order") {
                    int d = std::stoi(value);
                    if (d < 0) line_error(line, "order must be non-negative");
                    spec.order = d;
                } else if (key == "profile") {
                    if (value != "generic" && value != "quasilinear") line_error(line, "profile must be generic or quasilinear");
                    spec.profile = value;
                } else if (key == "extra-basis") {
                    spec.extra_basis.push_back(parse_at(value, spec.context(), line, static_cast<int>(vpos) + 2));
                } else {
                    spec.options[key] = value;
                }
            } catch (const std::invalid_argument&) {
                line_error(line, "bad value for option " + key);
            } catch (const std::out_of_range&) {
                line_error(line, "value out of range for option " + key);
            }
        } else {
            throw ParseError(line, static_cast<int>(kwpos) + 1, kw,
                             "line " + std::to_string(line) + ": unknown directive '" + kw + "'");
        }
    }
    return spec;
}

} // namespace liesym
