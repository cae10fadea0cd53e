#include "cosmo/calculus.hpp"

#include <map>

#include "cosmo/errors.hpp"

namespace cosmo {

namespace {

Expr diff1(const Expr& e, const Expr& var) {
  if (!e.depends_on(var)) return Expr(0);
  switch (e.kind()) {
    case Kind::Number:
      return Expr(0);
    case Kind::Symbol:
      return Expr(e == var ? 1 : 0);
    case Kind::Function:
      return Expr::derivative(e.name(), e.arg(), 1) * diff1(e.arg(), var);
    case Kind::Derivative:
      return Expr::derivative(e.name(), e.arg(), e.order() + 1) * diff1(e.arg(), var);
    case Kind::Add: {
      std::vector<Expr> ts;
      for (const auto& t : e.operands()) ts.push_back(diff1(t, var));
      return Expr::sum(std::move(ts));
    }
    case Kind::Mul: {
      const auto& fs = e.operands();
      std::vector<Expr> ts;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        if (!fs[i].depends_on(var)) continue;
        std::vector<Expr> prod;
        for (std::size_t j = 0; j < fs.size(); ++j) prod.push_back(i == j ? diff1(fs[j], var) : fs[j]);
        ts.push_back(Expr::product(std::move(prod)));
      }
      return Expr::sum(std::move(ts));
    }
    case Kind::Pow: {
      const Rational& q = e.exponent();
      return Expr(q) * pow(e.base(), q - 1) * diff1(e.base(), var);
    }
    case Kind::Exp:
      return e * diff1(e.arg(), var);
    case Kind::Log:
      return diff1(e.arg(), var) / e.arg();
    case Kind::Sin:
      return Expr::cos(e.arg()) * diff1(e.arg(), var);
    case Kind::Cos:
      return -(Expr::sin(e.arg()) * diff1(e.arg(), var));
  }
  return Expr(0);
}

bool is_atom_pattern(const Expr& p) {
  return p.is(Kind::Symbol) || p.is(Kind::Function) || p.is(Kind::Derivative);
}

struct Substituter {
  Expr pattern;
  Expr replacement;
  // For a function or derivative pattern: the function name, argument and order.
  bool derivative_family = false;
  int base_order = 0;
  // For a power pattern atom^n.
  bool power = false;
  Expr atom;
  long n = 1;

  Expr run(const Expr& e) const {
    if (!power && e == pattern) return replacement;
    if (derivative_family && e.is(Kind::Derivative) && e.name() == pattern.name() && e.arg() == pattern.arg() &&
        e.order() > base_order) {
      return diff(replacement, pattern.arg(), e.order() - base_order);
    }
    if (power && e.is(Kind::Pow) && e.base() == atom && e.exponent().get_den() == 1) {
      long m = e.exponent().get_num().get_si();
      long mag = m < 0 ? -m : m;
      if (mag >= n) {
        long sign = m < 0 ? -1 : 1;
        return pow(replacement, Rational(sign * (mag / n))) * pow(atom, Rational(sign * (mag % n)));
      }
    }
    switch (e.kind()) {
      case Kind::Number:
      case Kind::Symbol:
        return e;
      case Kind::Function:
        return Expr::function(e.name(), run(e.arg()));
      case Kind::Derivative:
        return Expr::derivative(e.name(), run(e.arg()), e.order());
      case Kind::Add: {
        std::vector<Expr> ts;
        for (const auto& t : e.operands()) ts.push_back(run(t));
        return Expr::sum(std::move(ts));
      }
      case Kind::Mul: {
        std::vector<Expr> fs;
        for (const auto& f : e.operands()) fs.push_back(run(f));
        return Expr::product(std::move(fs));
      }
      case Kind::Pow:
        return pow(run(e.base()), e.exponent());
      case Kind::Exp:
        return Expr::exp(run(e.arg()));
      case Kind::Log:
        return Expr::log(run(e.arg()));
      case Kind::Sin:
        return Expr::sin(run(e.arg()));
      case Kind::Cos:
        return Expr::cos(run(e.arg()));
    }
    return e;
  }
};

}  // namespace

Expr diff(const Expr& e, const Expr& var, int order) {
  if (!var.is(Kind::Symbol)) throw UnsupportedError("differentiation variable must be a symbol");
  Expr out = e;
  for (int i = 0; i < order; ++i) out = diff1(out, var);
  return out;
}

Expr substitute(const Expr& e, const Expr& pattern, const Expr& replacement) {
  Substituter s;
  s.pattern = pattern;
  s.replacement = replacement;
  if (is_atom_pattern(pattern)) {
    if ((pattern.is(Kind::Function) || pattern.is(Kind::Derivative)) && pattern.arg().is(Kind::Symbol)) {
      s.derivative_family = true;
      s.base_order = pattern.is(Kind::Derivative) ? pattern.order() : 0;
    }
  } else if (pattern.is(Kind::Pow) && is_atom_pattern(pattern.base()) && pattern.exponent().get_den() == 1 &&
             pattern.exponent() >= 2) {
    s.power = true;
    s.atom = pattern.base();
    s.n = pattern.exponent().get_num().get_si();
  } else {
    throw UnsupportedError("unsupported substitution pattern: " + pattern.str());
  }
  return s.run(e);
}

std::optional<Expr> antiderivative(const Expr& e, const Expr& var) {
  if (!var.is(Kind::Symbol)) throw UnsupportedError("integration variable must be a symbol");
  Canonical c = Canonical::of(e);
  Kernel x = symbol_kernel(var.name());
  if (!c.depends_on(x)) return (c * Canonical::of_kernel(x)).to_expr();
  Monomial den_mono;
  Rational den_coeff = 1;
  if (!c.den().is_constant()) {
    if (!c.den().is_single_term()) return std::nullopt;
    den_mono = c.den().leading_monomial();
    den_coeff = c.den().leading_coeff();
  } else {
    den_coeff = c.den().constant_value();
  }
  Canonical total;
  for (const auto& [m, coef] : c.num().terms()) {
    std::map<Kernel, int, KernelLess> powers;
    for (const auto& [k, e2] : m) powers[k] += e2;
    for (const auto& [k, e2] : den_mono) powers[k] -= e2;
    Canonical constant(coef / den_coeff);
    Canonical rate;
    Canonical exps(1);
    Rational n = 0;
    for (const auto& [k, p] : powers) {
      if (p == 0) continue;
      Canonical kc = Canonical::of_kernel(k, p);
      if (!kc.depends_on(x)) {
        constant = constant * kc;
        continue;
      }
      if (k == x) {
        n += p;
        continue;
      }
      if (k->kind == KernelKind::Root && *k->arg == Canonical::of_kernel(x)) {
        n += Rational(p, k->order);
        continue;
      }
      Canonical exponent;
      if (k->kind == KernelKind::Exp) {
        exponent = *k->arg * Canonical(p);
      } else if (k->kind == KernelKind::Root && k->arg->num().is_single_term() &&
                 k->arg->num().leading_monomial().size() == 1 &&
                 k->arg->num().leading_monomial().front().first->kind == KernelKind::Exp &&
                 k->arg->num().leading_monomial().front().second == 1 && k->arg->num().leading_coeff() == 1) {
        exponent = *k->arg->num().leading_monomial().front().first->arg * Canonical(Rational(p, k->order));
      } else {
        return std::nullopt;
      }
      Canonical slope = exponent.derivative(x);
      if (slope.depends_on(x)) return std::nullopt;
      rate = rate + slope;
      exps = exps * kc;
    }
    if (!rate.is_zero()) {
      if (n != 0) return std::nullopt;
      total = total + constant * exps / rate;
    } else if (n == -1) {
      total = total + constant * make_log(Canonical::of_kernel(x));
    } else {
      total = total + constant * exps * Canonical::of_kernel(x).pow(Rational(n + 1)) / Canonical(n + 1);
    }
  }
  return total.to_expr();
}

std::vector<Expr> taylor_coefficients(const Expr& e, const Expr& var, const Expr& at, int order) {
  if (!var.is(Kind::Symbol)) throw UnsupportedError("expansion variable must be a symbol");
  Kernel x = symbol_kernel(var.name());
  std::vector<Expr> out;
  Canonical d = Canonical::of(e);
  Rational factorial = 1;
  for (int j = 0; j <= order; ++j) {
    if (j > 0) {
      d = d.derivative(x);
      factorial *= j;
    }
    Canonical at_point = Canonical::of(substitute(d.to_expr(), var, at));
    out.push_back((at_point / Canonical(factorial)).to_expr());
  }
  return out;
}

}  // namespace cosmo
