#pragma once

#include <gmpxx.h>

#include <string>

namespace liesym {

/// Exact rational. mpq_class keeps gcd(num, den) = 1 and den > 0 after canonicalize().
using Scalar = mpq_class;
using Integer = mpz_class;

Scalar make_scalar(long num, long den = 1);
Scalar parse_scalar(const std::string& text);
std::string to_string(const Scalar& s);
bool is_integer(const Scalar& s);
/// Exact power with integer exponent; throws DivisionByZero for 0^negative.
Scalar pow(const Scalar& base, long exp);
/// Exact q-th root of a non-negative rational if it is rational.
bool exact_root(const Scalar& base, unsigned long q, Scalar& out);
std::size_t bit_length(const Scalar& s);

} // namespace liesym
