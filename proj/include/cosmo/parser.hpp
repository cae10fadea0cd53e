#pragma once

#include <string>

#include "cosmo/expr.hpp"

namespace cosmo {

/// Parses infix text.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | name | name '(' args ')' | '(' expr ')'
///
/// Built-ins: exp, ln (alias log), sin, cos, sqrt, diff(e, x[, n]) and
/// fderiv(F, n, arg) for the n-th derivative of an opaque function. Any other
/// name applied to one argument is an opaque function. Decimal literals are
/// read as exact rationals. Throws ParseError carrying the byte offset.
Expr parse(const std::string& text);

}  // namespace cosmo
