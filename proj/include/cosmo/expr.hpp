#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

namespace cosmo {

using Rational = mpq_class;

/// Node kinds of the expression tree.
enum class Kind {
  Number,      ///< exact rational constant
  Symbol,      ///< named constant or coordinate (`k`, `w`, `Pi`, `t`)
  Function,    ///< opaque function of one argument, `R(t)`
  Derivative,  ///< n-th derivative of an opaque function at its argument
  Add,
  Mul,
  Pow,  ///< base raised to a rational exponent
  Exp,
  Log,
  Sin,
  Cos,
};

/// Immutable expression tree with structural equality.
///
/// Construction goes through the static builders, which do light folding
/// (flattening, numeric constant folding, dropping neutral elements) but no
/// algebraic normalization; `simplify` produces the canonical representative.
/// Copies share the underlying node.
class Expr {
 public:
  Expr();  // the number 0
  Expr(int value);  // NOLINT(google-explicit-constructor)
  Expr(long value);  // NOLINT(google-explicit-constructor)
  Expr(const Rational& value);  // NOLINT(google-explicit-constructor)

  static Expr number(const Rational& value);
  static Expr symbol(const std::string& name);
  static Expr function(const std::string& name, const Expr& arg);
  static Expr derivative(const std::string& name, const Expr& arg, int order);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(const Expr& base, const Rational& exponent);
  static Expr exp(const Expr& arg);
  static Expr log(const Expr& arg);
  static Expr sin(const Expr& arg);
  static Expr cos(const Expr& arg);
  static Expr sqrt(const Expr& arg) { return power(arg, Rational(1, 2)); }

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }
  bool is_number() const { return is(Kind::Number); }
  bool is_zero_literal() const;
  bool is_one_literal() const;

  /// Number value, or Pow exponent.
  const Rational& value() const;
  const Rational& exponent() const { return value(); }
  /// Symbol / Function / Derivative name.
  const std::string& name() const;
  /// Children: Add/Mul terms, Pow base, elementary-function or Function argument.
  const std::vector<Expr>& operands() const;
  const Expr& arg() const { return operands().front(); }
  const Expr& base() const { return operands().front(); }
  int order() const;

  std::size_t hash() const;
  bool operator==(const Expr& other) const;
  bool operator!=(const Expr& other) const { return !(*this == other); }
  /// Total structural order, used for deterministic containers.
  bool operator<(const Expr& other) const;

  /// Infix text in the input grammar; parses back to an equal value.
  std::string str() const;
  std::string latex() const;

  /// True if `sym` (a Symbol) occurs anywhere in the tree.
  bool depends_on(const Expr& sym) const;
  /// Visit every node, parents before children.
  void walk(const std::function<void(const Expr&)>& visit) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  static Expr make(Kind kind, Rational value, std::string name, std::vector<Expr> ops, int order);

  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, const Rational& exponent);

inline Expr sym(const std::string& name) { return Expr::symbol(name); }
inline Expr fn(const std::string& name, const Expr& arg) { return Expr::function(name, arg); }

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

std::string to_string(const Rational& q);

}  // namespace cosmo
