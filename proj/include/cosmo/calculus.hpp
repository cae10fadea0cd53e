#pragma once

#include <optional>
#include <string>

#include "cosmo/canonical.hpp"
#include "cosmo/expr.hpp"

namespace cosmo {

/// Total derivative with respect to the symbol `var`.
Expr diff(const Expr& e, const Expr& var, int order = 1);

/// Replaces every occurrence of `pattern` by `replacement`.
///
/// `pattern` is a symbol, a function application R(t), a derivative node, or
/// an integer power of one of those. A function or derivative pattern also
/// rewrites higher derivatives of the same function, which are expressed as
/// derivatives of the replacement (so R'(t) -> H(t)R(t) turns R''(t) into
/// d/dt(H(t)R(t))). A power pattern P^n rewrites P^m as
/// replacement^(m div n) * P^(m mod n) for m >= n. Other patterns throw
/// UnsupportedError.
Expr substitute(const Expr& e, const Expr& pattern, const Expr& replacement);

/// Closed-form antiderivative in `var` for sums of c * var^n * exp(a*var)
/// with n = 0 or a = 0; nullopt otherwise.
std::optional<Expr> antiderivative(const Expr& e, const Expr& var);

/// Taylor coefficients c_0..c_order of e about var = at.
std::vector<Expr> taylor_coefficients(const Expr& e, const Expr& var, const Expr& at, int order);

}  // namespace cosmo
