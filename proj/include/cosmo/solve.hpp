#pragma once

#include <map>
#include <vector>

#include "cosmo/expr.hpp"

namespace cosmo {

/// Solves residuals == 0 for unknowns (symbols, function applications or
/// derivative nodes) by exact elimination. Each residual must be affine in
/// the unknowns: NonlinearError otherwise, SingularSystemError when the
/// coefficient matrix is singular.
std::map<Expr, Expr> solve_linear(const std::vector<Expr>& equations, const std::vector<Expr>& unknowns);

}  // namespace cosmo
