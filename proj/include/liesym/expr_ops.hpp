#pragma once

#include "liesym/expr.hpp"
#include "liesym/ratfun.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace liesym {

/// Partial derivative with respect to the symbol s.
Expr differentiate(const Expr& e, const Expr& s);

/// Rational-function normal form rendered back into a tree.
Expr normalize(const Expr& e);

/// Keys are symbols, or funcsym patterns f(a,b) with distinct symbol
/// arguments; a pattern also rewrites every derivative f{J}(...).
using Bindings = std::vector<std::pair<Expr, Expr>>;
Expr substitute(const Expr& e, const Bindings& bindings);

enum class EqualityBranch { Deterministic, Probabilistic };

struct EquivalenceResult {
    bool equal = false;
    EqualityBranch branch = EqualityBranch::Deterministic;
};

constexpr int kProbePoints = 8;
constexpr double kProbeTolerance = 1e-9;

/// Seed for equality probes when a caller passes none (42 at start-up).
std::uint64_t probe_seed();
void set_probe_seed(std::uint64_t seed);

/// Throws Undecided when probe points disagree.
EquivalenceResult equivalence(const Expr& a, const Expr& b, std::uint64_t seed = probe_seed());
bool equivalent(const Expr& a, const Expr& b, std::uint64_t seed = probe_seed());
/// Same test on normal forms; used by the engine.
EquivalenceResult zero_test(const RatFun& a, const RatFun& b, std::uint64_t seed = probe_seed());

struct MonomialMap {
    std::vector<Expr> symbols;
    std::map<std::vector<int>, Expr> terms;

    Expr reassemble() const;
};

MonomialMap collect_coefficients(const Expr& e, const std::vector<Expr>& symbols);

Scalar evaluate_exact(const Expr& e, const std::map<std::string, Scalar>& point);
double evaluate_numeric(const Expr& e, const std::map<std::string, double>& point);

/// Exact evaluation of a normal form; atoms resolved by symbol name.
Scalar evaluate_exact(const RatFun& r, const std::map<std::string, Scalar>& point);
double evaluate_numeric(const RatFun& r, const std::map<std::string, double>& point);

/// Symbol atoms a normal form depends on (through kernels and funcsyms too).
std::vector<int> symbol_atoms(const RatFun& r);

} // namespace liesym
