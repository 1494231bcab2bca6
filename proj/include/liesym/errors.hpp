#pragma once

#include <stdexcept>
#include <string>

namespace liesym {

/// Base of every error the engine raises. kind() is a stable tag used by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define LIESYM_ERROR(Name)                                                   \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}         \
    };

LIESYM_ERROR(CyclicBinding)
LIESYM_ERROR(NotPolynomial)
LIESYM_ERROR(DivisionByZero)
LIESYM_ERROR(InexactKernel)
LIESYM_ERROR(DomainFault)
LIESYM_ERROR(Undecided)
LIESYM_ERROR(UnboundSymbol)
LIESYM_ERROR(UnknownIdentifier)
LIESYM_ERROR(ValidationError)
LIESYM_ERROR(NonAffineLeading)
LIESYM_ERROR(ZeroLeadingCoefficient)
LIESYM_ERROR(OrderMismatch)
LIESYM_ERROR(NotInverse)
LIESYM_ERROR(DependentBasis)
LIESYM_ERROR(NotClosed)
LIESYM_ERROR(NotNilpotent)
LIESYM_ERROR(NotTwoDimensional)
LIESYM_ERROR(ZeroDenominator)
LIESYM_ERROR(InternalError)

#undef LIESYM_ERROR

/// Syntax error with a 1-based position inside the source text.
class ParseError : public Error {
public:
    ParseError(int line, int column, std::string token, const std::string& msg)
        : Error("ParseError", msg), line_(line), column_(column), token_(std::move(token)) {}
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& token() const { return token_; }

private:
    int line_;
    int column_;
    std::string token_;
};

} // namespace liesym
