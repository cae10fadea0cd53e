#include "cosmo/solve.hpp"

#include <algorithm>

#include "cosmo/canonical.hpp"
#include "cosmo/errors.hpp"

namespace cosmo {

std::map<Expr, Expr> solve_linear(const std::vector<Expr>& equations, const std::vector<Expr>& unknowns) {
  const std::size_t n = unknowns.size();
  if (equations.size() != n) throw UnsupportedError("solve_linear needs as many equations as unknowns");
  std::vector<Kernel> xs;
  for (const auto& u : unknowns) {
    Canonical c = Canonical::of(u);
    if (!(c.den().is_constant() && c.num().is_single_term() && c.num().leading_coeff() == 1 &&
          c.num().leading_monomial().size() == 1 && c.num().leading_monomial().front().second == 1))
      throw UnsupportedError("unknown must be a symbol or function application: " + u.str());
    xs.push_back(c.num().leading_monomial().front().first);
  }
  auto is_unknown = [&](const Kernel& k) { return std::find(xs.begin(), xs.end(), k) != xs.end(); };

  std::vector<std::vector<Canonical>> a(n, std::vector<Canonical>(n));
  std::vector<Canonical> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    Canonical r = Canonical::of(equations[i]);
    for (const auto& k : r.den().kernels())
      for (const auto& kk : Canonical::of_kernel(k).all_kernels())
        if (is_unknown(kk)) throw NonlinearError("unknown occurs in a denominator of equation " + std::to_string(i));
    for (const auto& k : r.num().kernels()) {
      if (is_unknown(k)) continue;
      for (const auto& kk : Canonical::of_kernel(k).all_kernels())
        if (is_unknown(kk)) throw NonlinearError("unknown occurs inside a function in equation " + std::to_string(i));
    }
    Poly rest = r.num();
    for (std::size_t j = 0; j < n; ++j) {
      if (r.num().degree(xs[j]) > 1) throw NonlinearError("unknown occurs nonlinearly in equation " + std::to_string(i));
      Poly coeff = r.num().coefficient(xs[j], 1);
      for (const auto& x : xs)
        if (coeff.contains(x)) throw NonlinearError("product of unknowns in equation " + std::to_string(i));
      a[i][j] = Canonical::fraction(coeff, r.den());
      rest = rest.coefficient(xs[j], 0);
    }
    rhs[i] = -Canonical::fraction(rest, r.den());
  }

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col].is_zero()) ++pivot;
    if (pivot == n) throw SingularSystemError("singular linear system");
    std::swap(a[pivot], a[col]);
    std::swap(rhs[pivot], rhs[col]);
    Canonical inv = a[col][col].inverse();
    for (std::size_t j = col; j < n; ++j) a[col][j] = a[col][j] * inv;
    rhs[col] = rhs[col] * inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col].is_zero()) continue;
      Canonical f = a[i][col];
      for (std::size_t j = col; j < n; ++j) a[i][j] = a[i][j] - f * a[col][j];
      rhs[i] = rhs[i] - f * rhs[col];
    }
  }
  std::map<Expr, Expr> out;
  for (std::size_t j = 0; j < n; ++j) out.emplace(unknowns[j], rhs[j].to_expr());
  return out;
}

}  // namespace cosmo
