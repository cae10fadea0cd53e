#include "cosmo/expr.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "cosmo/errors.hpp"

namespace cosmo {

struct Expr::Node {
  Kind kind;
  Rational value;
  std::string name;
  std::vector<Expr> ops;
  int order = 0;
  std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational& q) {
  const unsigned long p = 2305843009213693951UL;  // 2^61 - 1
  std::size_t h = mpz_fdiv_ui(q.get_num_mpz_t(), p);
  h = mix(h, mpz_fdiv_ui(q.get_den_mpz_t(), p));
  return mix(h, static_cast<std::size_t>(sgn(q) + 1));
}

// Function-local so that expressions can be built during static initialization.
const Rational& kZero() {
  static const Rational z(0);
  return z;
}

}  // namespace

std::string to_string(const Rational& q) { return q.get_str(); }

Expr::Expr() : Expr(number(Rational(0))) {}
Expr::Expr(int value) : Expr(number(Rational(value))) {}
Expr::Expr(long value) : Expr(number(Rational(value))) {}
Expr::Expr(const Rational& value) : Expr(number(value)) {}
Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::make(Kind kind, Rational value, std::string name, std::vector<Expr> ops, int order) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->value = std::move(value);
  node->value.canonicalize();
  node->name = std::move(name);
  node->ops = std::move(ops);
  node->order = order;
  std::size_t h = static_cast<std::size_t>(kind) * 1000003u;
  h = mix(h, hash_rational(node->value));
  h = mix(h, std::hash<std::string>{}(node->name));
  h = mix(h, static_cast<std::size_t>(order));
  for (const auto& op : node->ops) h = mix(h, op.hash());
  node->hash = h;
  return Expr(std::shared_ptr<const Node>(std::move(node)));
}

Expr Expr::number(const Rational& value) { return make(Kind::Number, value, {}, {}, 0); }

Expr Expr::symbol(const std::string& name) {
  if (name.empty()) throw UnsupportedError("empty symbol name");
  return make(Kind::Symbol, kZero(), name, {}, 0);
}

Expr Expr::function(const std::string& name, const Expr& arg) {
  return make(Kind::Function, kZero(), name, {arg}, 0);
}

Expr Expr::derivative(const std::string& name, const Expr& arg, int order) {
  if (order < 0) throw UnsupportedError("negative derivative order");
  if (order == 0) return function(name, arg);
  return make(Kind::Derivative, kZero(), name, {arg}, order);
}

Expr Expr::sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  Rational constant = 0;
  for (auto& t : terms) {
    if (t.is(Kind::Add)) {
      for (const auto& u : t.operands()) {
        if (u.is_number())
          constant += u.value();
        else
          flat.push_back(u);
      }
    } else if (t.is_number()) {
      constant += t.value();
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (constant != 0) flat.push_back(number(constant));
  if (flat.empty()) return number(0);
  if (flat.size() == 1) return flat.front();
  return make(Kind::Add, kZero(), {}, std::move(flat), 0);
}

Expr Expr::product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  Rational coeff = 1;
  for (auto& f : factors) {
    if (f.is(Kind::Mul)) {
      for (const auto& u : f.operands()) {
        if (u.is_number())
          coeff *= u.value();
        else
          flat.push_back(u);
      }
    } else if (f.is_number()) {
      coeff *= f.value();
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (coeff == 0) return number(0);
  if (coeff != 1) flat.insert(flat.begin(), number(coeff));
  if (flat.empty()) return number(coeff);
  if (flat.size() == 1) return flat.front();
  return make(Kind::Mul, kZero(), {}, std::move(flat), 0);
}

Expr Expr::power(const Expr& base, const Rational& exponent) {
  if (exponent == 0) return number(1);
  if (exponent == 1) return base;
  if (base.is_number() && exponent.get_den() == 1) {
    const Rational& b = base.value();
    if (b == 0 && exponent < 0) throw DomainError("division by zero");
    if (exponent.get_num().fits_slong_p()) {
      long n = exponent.get_num().get_si();
      Rational r;
      mpz_pow_ui(r.get_num_mpz_t(), b.get_num_mpz_t(), static_cast<unsigned long>(n < 0 ? -n : n));
      mpz_pow_ui(r.get_den_mpz_t(), b.get_den_mpz_t(), static_cast<unsigned long>(n < 0 ? -n : n));
      r.canonicalize();
      if (n < 0) r = 1 / r;
      return number(r);
    }
  }
  if (base.is_number() && (base.value() == 0 || base.value() == 1) && exponent > 0) return base;
  return make(Kind::Pow, exponent, {}, {base}, 0);
}

Expr Expr::exp(const Expr& arg) {
  if (arg.is_zero_literal()) return number(1);
  return make(Kind::Exp, kZero(), {}, {arg}, 0);
}

Expr Expr::log(const Expr& arg) {
  if (arg.is_one_literal()) return number(0);
  return make(Kind::Log, kZero(), {}, {arg}, 0);
}

Expr Expr::sin(const Expr& arg) {
  if (arg.is_zero_literal()) return number(0);
  return make(Kind::Sin, kZero(), {}, {arg}, 0);
}

Expr Expr::cos(const Expr& arg) {
  if (arg.is_zero_literal()) return number(1);
  return make(Kind::Cos, kZero(), {}, {arg}, 0);
}

Kind Expr::kind() const { return node_->kind; }
bool Expr::is_zero_literal() const { return is_number() && node_->value == 0; }
bool Expr::is_one_literal() const { return is_number() && node_->value == 1; }
const Rational& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
const std::vector<Expr>& Expr::operands() const { return node_->ops; }
int Expr::order() const { return node_->order; }
std::size_t Expr::hash() const { return node_->hash; }

bool Expr::operator==(const Expr& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.hash != b.hash || a.kind != b.kind || a.order != b.order || a.ops.size() != b.ops.size())
    return false;
  if (a.value != b.value || a.name != b.name) return false;
  for (std::size_t i = 0; i < a.ops.size(); ++i)
    if (a.ops[i] != b.ops[i]) return false;
  return true;
}

bool Expr::operator<(const Expr& other) const {
  if (node_ == other.node_) return false;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind) return a.kind < b.kind;
  if (int c = cmp(a.value, b.value); c != 0) return c < 0;
  if (int c = a.name.compare(b.name); c != 0) return c < 0;
  if (a.order != b.order) return a.order < b.order;
  return std::lexicographical_compare(a.ops.begin(), a.ops.end(), b.ops.begin(), b.ops.end());
}

bool Expr::depends_on(const Expr& s) const {
  if (*this == s) return true;
  for (const auto& op : operands())
    if (op.depends_on(s)) return true;
  return false;
}

void Expr::walk(const std::function<void(const Expr&)>& visit) const {
  visit(*this);
  for (const auto& op : operands()) op.walk(visit);
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator-(const Expr& a) { return Expr::product({Expr(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_number()) {
    if (b.value() == 0) throw DomainError("division by zero");
    return Expr::product({a, Expr(1 / b.value())});
  }
  return Expr::product({a, Expr::power(b, Rational(-1))});
}
Expr pow(const Expr& base, const Rational& exponent) { return Expr::power(base, exponent); }

// ---------------------------------------------------------------------------
// Plain-text printer

namespace {

enum Prec { kPrecAdd = 1, kPrecMul = 2, kPrecUnary = 3, kPrecPow = 4, kPrecAtom = 5 };

std::string print(const Expr& e, int required);

/// Splits a term into a sign and its magnitude so sums print as `a - b`.
bool is_negative_term(const Expr& e) {
  if (e.is_number()) return e.value() < 0;
  if (e.is(Kind::Mul) && e.operands().front().is_number()) return e.operands().front().value() < 0;
  return false;
}

Expr negate_term(const Expr& e) {
  if (e.is_number()) return Expr(-e.value());
  std::vector<Expr> ops = e.operands();
  ops.front() = Expr(-ops.front().value());
  return Expr::product(std::move(ops));
}

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
      if (e.value() < 0) return kPrecUnary;
      return e.value().get_den() == 1 ? kPrecAtom : kPrecMul;
    case Kind::Add:
      return kPrecAdd;
    case Kind::Mul:
      return is_negative_term(e) ? kPrecUnary : kPrecMul;
    case Kind::Pow:
      if (e.exponent() == Rational(1, 2)) return kPrecAtom;
      return kPrecPow;
    default:
      return kPrecAtom;
  }
}

std::string wrap(const Expr& e, int required) {
  std::string s = print(e, required);
  if (precedence(e) < required) return "(" + s + ")";
  return s;
}

std::string print_mul(const Expr& e) {
  Rational coeff = 1;
  std::vector<Expr> num, den;
  for (const auto& f : e.operands()) {
    if (f.is_number()) {
      coeff *= f.value();
    } else if (f.is(Kind::Pow) && f.exponent() < 0) {
      den.push_back(Expr::power(f.base(), -f.exponent()));
    } else {
      num.push_back(f);
    }
  }
  std::string out;
  if (coeff < 0) {
    out = "-";
    coeff = -coeff;
  }
  std::vector<std::string> parts;
  if (coeff.get_num() != 1 || num.empty()) parts.push_back(coeff.get_num().get_str());
  for (const auto& f : num) parts.push_back(wrap(f, kPrecPow));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "*";
    out += parts[i];
  }
  std::vector<Expr> den_all;
  if (coeff.get_den() != 1) den_all.push_back(Expr(Rational(coeff.get_den())));
  for (auto& d : den) den_all.push_back(d);
  if (den_all.empty()) return out;
  if (den_all.size() == 1) return out + "/" + wrap(den_all.front(), kPrecPow);
  std::string d;
  for (std::size_t i = 0; i < den_all.size(); ++i) {
    if (i) d += "*";
    d += wrap(den_all[i], kPrecPow);
  }
  return out + "/(" + d + ")";
}

std::string print(const Expr& e, int /*required*/) {
  switch (e.kind()) {
    case Kind::Number:
      return e.value().get_str();
    case Kind::Symbol:
      return e.name();
    case Kind::Function:
      return e.name() + "(" + print(e.arg(), 0) + ")";
    case Kind::Derivative: {
      if (e.arg().is(Kind::Symbol)) {
        std::string s = "diff(" + e.name() + "(" + e.arg().name() + ")," + e.arg().name();
        if (e.order() != 1) s += "," + std::to_string(e.order());
        return s + ")";
      }
      return "fderiv(" + e.name() + "," + std::to_string(e.order()) + "," + print(e.arg(), 0) + ")";
    }
    case Kind::Add: {
      std::string out;
      bool first = true;
      for (const auto& t : e.operands()) {
        if (first) {
          out += wrap(t, kPrecAdd);
          first = false;
        } else if (is_negative_term(t)) {
          out += " - " + wrap(negate_term(t), kPrecMul);
        } else {
          out += " + " + wrap(t, kPrecAdd);
        }
      }
      return out;
    }
    case Kind::Mul:
      return print_mul(e);
    case Kind::Pow: {
      const Rational& q = e.exponent();
      if (q == Rational(1, 2)) return "sqrt(" + print(e.base(), 0) + ")";
      std::string b = wrap(e.base(), kPrecAtom);
      if (q.get_den() == 1 && q > 0) return b + "^" + q.get_str();
      return b + "^(" + q.get_str() + ")";
    }
    case Kind::Exp:
      return "exp(" + print(e.arg(), 0) + ")";
    case Kind::Log:
      return "ln(" + print(e.arg(), 0) + ")";
    case Kind::Sin:
      return "sin(" + print(e.arg(), 0) + ")";
    case Kind::Cos:
      return "cos(" + print(e.arg(), 0) + ")";
  }
  return {};
}

// ---------------------------------------------------------------------------
// LaTeX printer (display only)

std::string latex_name(const std::string& n) {
  static const char* greek[] = {"alpha", "beta",  "gamma", "delta", "epsilon", "theta",
                                "lambda", "mu",   "nu",    "rho",   "sigma",   "tau",
                                "phi",   "varphi", "chi",  "psi",   "omega",   "xi"};
  for (const char* g : greek)
    if (n == g) return std::string("\\") + g;
  if (n == "Pi") return "\\pi";
  if (n == "w") return "\\omega";
  if (n == "phi0") return "\\phi_0";
  if (n == "R0") return "R_0";
  if (n.size() > 1) return "\\mathrm{" + n + "}";
  return n;
}

std::string latex(const Expr& e);

std::string latex_wrap(const Expr& e, int required) {
  std::string s = latex(e);
  if (precedence(e) < required) return "\\left(" + s + "\\right)";
  return s;
}

std::string latex(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number: {
      const Rational& q = e.value();
      if (q.get_den() == 1) return q.get_str();
      std::string sign = q < 0 ? "-" : "";
      return sign + "\\frac{" + mpz_class(abs(q.get_num())).get_str() + "}{" + q.get_den().get_str() + "}";
    }
    case Kind::Symbol:
      return latex_name(e.name());
    case Kind::Function:
      return latex_name(e.name()) + "(" + latex(e.arg()) + ")";
    case Kind::Derivative: {
      std::string f = latex_name(e.name());
      if (e.order() == 1) return "\\dot{" + f + "}(" + latex(e.arg()) + ")";
      if (e.order() == 2) return "\\ddot{" + f + "}(" + latex(e.arg()) + ")";
      return f + "^{(" + std::to_string(e.order()) + ")}(" + latex(e.arg()) + ")";
    }
    case Kind::Add: {
      std::string out;
      bool first = true;
      for (const auto& t : e.operands()) {
        if (first) {
          out += latex_wrap(t, kPrecAdd);
          first = false;
        } else if (is_negative_term(t)) {
          out += " - " + latex_wrap(negate_term(t), kPrecMul);
        } else {
          out += " + " + latex_wrap(t, kPrecAdd);
        }
      }
      return out;
    }
    case Kind::Mul: {
      Rational coeff = 1;
      std::vector<Expr> num, den;
      for (const auto& f : e.operands()) {
        if (f.is_number())
          coeff *= f.value();
        else if (f.is(Kind::Pow) && f.exponent() < 0)
          den.push_back(Expr::power(f.base(), -f.exponent()));
        else
          num.push_back(f);
      }
      std::string sign = coeff < 0 ? "-" : "";
      coeff = abs(coeff);
      std::string n, d;
      if (coeff.get_num() != 1) n = coeff.get_num().get_str();
      for (const auto& f : num) n += (n.empty() ? "" : " ") + latex_wrap(f, kPrecPow);
      if (coeff.get_den() != 1) d = coeff.get_den().get_str();
      for (const auto& f : den) d += (d.empty() ? "" : " ") + latex_wrap(f, den.size() == 1 && num.empty() ? 0 : kPrecMul);
      if (n.empty()) n = "1";
      if (d.empty()) return sign + n;
      return sign + "\\frac{" + n + "}{" + d + "}";
    }
    case Kind::Pow: {
      const Rational& q = e.exponent();
      if (q == Rational(1, 2)) return "\\sqrt{" + latex(e.base()) + "}";
      if (q < 0) return "\\frac{1}{" + latex(Expr::power(e.base(), -q)) + "}";
      return latex_wrap(e.base(), kPrecAtom) + "^{" + latex(Expr(q)) + "}";
    }
    case Kind::Exp:
      return "e^{" + latex(e.arg()) + "}";
    case Kind::Log:
      return "\\ln\\left(" + latex(e.arg()) + "\\right)";
    case Kind::Sin:
      return "\\sin\\left(" + latex(e.arg()) + "\\right)";
    case Kind::Cos:
      return "\\cos\\left(" + latex(e.arg()) + "\\right)";
  }
  return {};
}

}  // namespace

std::string Expr::str() const { return print(*this, 0); }
std::string Expr::latex() const { return cosmo::latex(*this); }

}  // namespace cosmo
