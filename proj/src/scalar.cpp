#include "liesym/scalar.hpp"

#include "liesym/errors.hpp"

namespace liesym {

Scalar make_scalar(long num, long den) {
    Scalar s(num, den);
    s.canonicalize();
    return s;
}

Scalar parse_scalar(const std::string& text) {
    Scalar s(text);
    s.canonicalize();
    return s;
}

std::string to_string(const Scalar& s) { return s.get_str(); }

bool is_integer(const Scalar& s) { return s.get_den() == 1; }

Scalar pow(const Scalar& base, long exp) {
    if (exp == 0) return Scalar(1);
    if (exp < 0) {
        if (base == 0) throw DivisionByZero("0 raised to a negative power");
        Scalar inv = 1 / base;
        return pow(inv, -exp);
    }
    Integer n, d;
    mpz_pow_ui(n.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exp));
    mpz_pow_ui(d.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exp));
    Scalar r(n, d);
    r.canonicalize();
    return r;
}

bool exact_root(const Scalar& base, unsigned long q, Scalar& out) {
    if (q == 1) {
        out = base;
        return true;
    }
    if (base < 0) {
        if (q % 2 == 0) return false;
        Scalar pos = -base;
        if (!exact_root(pos, q, out)) return false;
        out = -out;
        return true;
    }
    Integer n, d;
    if (!mpz_root(n.get_mpz_t(), base.get_num_mpz_t(), q)) return false;
    if (!mpz_root(d.get_mpz_t(), base.get_den_mpz_t(), q)) return false;
    out = Scalar(n, d);
    out.canonicalize();
    return true;
}

std::size_t bit_length(const Scalar& s) {
    return mpz_sizeinbase(s.get_num_mpz_t(), 2) + mpz_sizeinbase(s.get_den_mpz_t(), 2);
}

} // namespace liesym
