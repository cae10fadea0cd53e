#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cosmo/expr.hpp"
#include "cosmo/poly.hpp"

namespace cosmo {

/// Rational normal form num/den over kernel indeterminates.
///
/// Invariants after every operation:
///  - gcd(num, den) = 1 and den has leading coefficient 1 (lex order);
///  - sin(x)^2 is rewritten to 1 - cos(x)^2, root^n to its radicand;
///  - den is free of sin kernels and of square roots;
///  - exponentials are merged by the exponent laws, exp(q*ln(u)) = u^q.
/// Two values of the rational-kernel fragment are equal iff their forms are
/// identical. Symbols are taken positive when combining radicals.
class Canonical {
 public:
  Canonical() : den_(Rational(1)) {}
  Canonical(const Rational& c) : num_(c), den_(Rational(1)) {}  // NOLINT
  Canonical(int c) : Canonical(Rational(c)) {}                   // NOLINT
  static Canonical of(const Expr& e);
  static Canonical of_kernel(const Kernel& k, int exponent = 1);
  static Canonical of_poly(const Poly& p);
  /// Builds num/den and normalizes.
  static Canonical fraction(const Poly& num, const Poly& den);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  std::optional<Rational> constant_value() const;
  /// Sign of the leading numerator coefficient; 0 for zero.
  int leading_sign() const;

  Canonical operator+(const Canonical& o) const;
  Canonical operator-(const Canonical& o) const;
  Canonical operator-() const;
  Canonical operator*(const Canonical& o) const;
  Canonical operator/(const Canonical& o) const;
  Canonical& operator+=(const Canonical& o) { return *this = *this + o; }
  Canonical& operator-=(const Canonical& o) { return *this = *this - o; }
  Canonical& operator*=(const Canonical& o) { return *this = *this * o; }
  Canonical pow(long n) const;
  Canonical pow(const Rational& q) const;
  Canonical inverse() const;

  /// d/d(var) where var is a Symbol kernel.
  Canonical derivative(const Kernel& var) const;
  bool depends_on(const Kernel& var) const;

  Expr to_expr() const;
  std::string str() const { return to_expr().str(); }

  bool operator==(const Canonical& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Canonical& o) const { return !(*this == o); }

  /// Kernels occurring anywhere, including inside kernel arguments.
  std::vector<Kernel> all_kernels() const;
  /// True when equality of forms decides equality of values (see class doc).
  bool in_rational_fragment() const;

 private:
  Poly num_;
  Poly den_;
};

Canonical make_exp(const Canonical& arg);
Canonical make_log(const Canonical& arg);
Canonical make_sin(const Canonical& arg);
Canonical make_cos(const Canonical& arg);
Canonical make_function(const std::string& name, const Canonical& arg);
Canonical make_derivative(const std::string& name, const Canonical& arg, int order);

/// Canonical representative as an expression tree. Idempotent.
Expr simplify(const Expr& e);
bool equivalent(const Expr& a, const Expr& b);

enum class ZeroPath { Canonical, Sampling };

struct ZeroTest {
  bool zero = false;
  ZeroPath path = ZeroPath::Canonical;
  int points_evaluated = 0;
};

/// Settings of the numeric fallback of is_zero.
struct SamplingPolicy {
  int points = 20;
  double lo = 0.1;
  double hi = 2.0;
  unsigned long long seed = 0xC0540;
  double threshold = 1e-9;
};

/// Decides e == 0: by canonical form inside the rational-kernel fragment,
/// otherwise by seeded sampling. Throws UndecidableError when no sample
/// point can be evaluated.
ZeroTest zero_test(const Expr& e, const SamplingPolicy& policy = {});
ZeroTest zero_test(const Canonical& c, const SamplingPolicy& policy = {});
bool is_zero(const Expr& e);
bool is_zero(const Canonical& c);

/// Evaluates a canonical form; `leaf` supplies values of Symbol, Function
/// and Derivative kernels. Pi evaluates to the constant unless `leaf`
/// handles it first.
double evaluate(const Canonical& c, const std::function<double(const Kernel&)>& leaf);

/// Deterministic uniform doubles in [0, 1) shared by the sampling code.
class SplitMix64 {
 public:
  explicit SplitMix64(unsigned long long seed) : state_(seed) {}
  unsigned long long next();
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  unsigned long long state_;
};

}  // namespace cosmo
