#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cosmo/expr.hpp"

namespace cosmo {

class Canonical;

enum class KernelKind { Symbol, Function, Derivative, Exp, Log, Sin, Cos, Root };

/// An indeterminate of the rational normal form: a symbol, an opaque function
/// application or derivative, or a transcendental / algebraic atom whose
/// argument is itself in canonical form.
struct KernelData {
  KernelKind kind;
  std::string name;  ///< Symbol / Function / Derivative name
  int order = 0;     ///< derivative order, or root index for Root
  std::shared_ptr<const Canonical> arg;  ///< argument, or radicand for Root
  std::string key;   ///< unique structural key; defines the variable order
};

/// Kernels are interned: equal kernels share one object.
using Kernel = std::shared_ptr<const KernelData>;

Kernel symbol_kernel(const std::string& name);
Kernel make_kernel(KernelKind kind, const std::string& name, int order, const Canonical& arg);

/// Variable order. Smaller keys are more significant in the lex term order.
inline bool kernel_less(const Kernel& a, const Kernel& b) {
  return a != b && a->key < b->key;
}

struct KernelLess {
  bool operator()(const Kernel& a, const Kernel& b) const { return kernel_less(a, b); }
};

/// Sorted by kernel, positive exponents only.
using Monomial = std::vector<std::pair<Kernel, int>>;

/// Pure lexicographic order on monomials.
struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

Monomial monomial_mul(const Monomial& a, const Monomial& b);
/// a / b when b divides a.
std::optional<Monomial> monomial_div(const Monomial& a, const Monomial& b);
Monomial monomial_gcd(const Monomial& a, const Monomial& b);
int monomial_degree(const Monomial& m, const Kernel& x);

/// Sparse multivariate polynomial over the rationals in kernel indeterminates.
class Poly {
 public:
  using Terms = std::map<Monomial, Rational, MonomialLess>;

  Poly() = default;
  explicit Poly(const Rational& c);
  static Poly of_kernel(const Kernel& k, int exponent = 1);
  static Poly of_monomial(const Monomial& m, const Rational& c);

  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Constant term value; only meaningful when is_constant().
  Rational constant_value() const;
  bool is_single_term() const { return terms_.size() == 1; }

  const Monomial& leading_monomial() const { return terms_.rbegin()->first; }
  const Rational& leading_coeff() const { return terms_.rbegin()->second; }

  int degree(const Kernel& x) const;
  bool contains(const Kernel& x) const { return degree(x) > 0; }
  /// Coefficient of x^d as a polynomial in the remaining kernels.
  Poly coefficient(const Kernel& x, int d) const;
  /// All coefficients by power of x.
  std::map<int, Poly> coefficients(const Kernel& x) const;
  /// Kernels occurring at top level, sorted.
  std::vector<Kernel> kernels() const;
  /// Formal partial derivative with respect to kernel x.
  Poly partial(const Kernel& x) const;
  /// Greatest monomial dividing every term.
  Monomial monomial_content() const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly scaled(const Rational& c) const;
  Poly times_monomial(const Monomial& m) const;
  Poly pow(unsigned n) const;
  bool operator==(const Poly& o) const { return terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  void add_term(const Monomial& m, const Rational& c);

 private:
  Terms terms_;
};

/// Exact quotient a / b, or nullopt when b does not divide a.
std::optional<Poly> divide_exact(const Poly& a, const Poly& b);
/// Greatest common divisor over Q, made monic in the lex order.
Poly gcd(const Poly& a, const Poly& b);
/// Divides by the leading coefficient.
Poly monic(const Poly& p);
/// Positive rational c with p / c having coprime integer coefficients.
Rational rational_content(const Poly& p);

}  // namespace cosmo
