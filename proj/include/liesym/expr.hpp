#pragma once

#include "liesym/scalar.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

namespace liesym {

class RatFun;
struct Node;

enum class NodeKind { Scalar, Symbol, FuncSym, Kernel, Power, Product, Sum };
enum class KernelKind { Exp, Ln, Sin, Cos, Arctan };

const char* kernel_name(KernelKind k);

/// Interned symbol. Jet coordinates carry their dependent name, the per-variable
/// derivative counts and the ordered list of independent names they refer to.
struct SymbolInfo {
    std::string name;
    std::string dependent;
    std::vector<int> counts;
    std::vector<std::string> independents;
    int atom_id = -1;

    bool is_jet() const { return !dependent.empty(); }
    int order() const;
};

/// Immutable expression tree. Built through the smart constructors below, so
/// sums and products are always flat, sorted and scalar-folded.
class Expr {
public:
    Expr();
    Expr(int v);
    Expr(long v);
    Expr(const Scalar& s);

    static Expr symbol(const std::string& name);
    /// Jet coordinate u_J; counts are per independent variable in frame order.
    static Expr jet(const std::string& dependent, const std::vector<int>& counts,
                    const std::vector<std::string>& independents);
    static Expr funcsym(const std::string& name, std::vector<Expr> args, std::vector<int> index = {});
    static Expr kernel(KernelKind k, const Expr& arg);
    static Expr sum(std::vector<Expr> terms);
    static Expr product(std::vector<Expr> factors);
    static Expr power(const Expr& base, const Scalar& exp);

    NodeKind kind() const;
    bool is_scalar() const { return kind() == NodeKind::Scalar; }
    bool is_zero() const;
    bool is_one() const;
    const Scalar& scalar() const;   // scalar value or power exponent
    const SymbolInfo& sym() const;  // Symbol nodes only
    const std::string& name() const;
    KernelKind kernel_kind() const;
    const std::vector<int>& index() const;
    const std::vector<Expr>& args() const;
    const Expr& base() const;  // Power base / Kernel argument

    std::size_t hash() const;
    const Node* node() const { return n_.get(); }

    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

private:
    explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
    friend struct ExprAccess;
};

struct Node {
    NodeKind kind = NodeKind::Scalar;
    Scalar value;
    const SymbolInfo* sym = nullptr;
    KernelKind kernel = KernelKind::Exp;
    std::string name;
    std::vector<int> index;
    std::vector<Expr> args;
    std::size_t hash = 0;

    mutable std::once_flag rf_once;
    mutable std::shared_ptr<const RatFun> rf;
};

/// Total structural order used for sorting children.
int compare(const Expr& a, const Expr& b);
struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, const Scalar& exp);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr arctan(const Expr& a);

/// Symbols occurring anywhere in e, including inside kernels and funcsym arguments.
std::set<const SymbolInfo*> free_symbols(const Expr& e);
bool contains_funcsym(const Expr& e, const std::string& name);

/// Pretty printer; the output parses back to an equal expression.
std::string render(const Expr& e);

} // namespace liesym
