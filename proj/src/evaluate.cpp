#include "cosmo/evaluate.hpp"

#include <cmath>

#include "cosmo/errors.hpp"

namespace cosmo {

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(what);
  return v;
}

double nth_derivative(const ScalarFn& f, double x, int order) {
  if (order <= 2) return fd_derivative(f, x, order);
  ScalarFn lower = [&](double y) { return fd_derivative(f, y, 2); };
  return nth_derivative(lower, x, order - 2);
}

double eval_rec(const Expr& e, const Bindings& b) {
  switch (e.kind()) {
    case Kind::Number:
      return e.value().get_d();
    case Kind::Symbol: {
      auto it = b.symbols.find(e.name());
      if (it != b.symbols.end()) return it->second;
      if (e.name() == "Pi") return M_PI;
      throw UnboundError("unbound symbol '" + e.name() + "'");
    }
    case Kind::Function: {
      auto it = b.functions.find(e.name());
      if (it == b.functions.end()) throw UnboundError("unbound function '" + e.name() + "'");
      return checked(it->second(eval_rec(e.arg(), b)), "non-finite function value");
    }
    case Kind::Derivative: {
      double x = eval_rec(e.arg(), b);
      auto it = b.derivatives.find({e.name(), e.order()});
      if (it != b.derivatives.end()) return checked(it->second(x), "non-finite derivative value");
      auto fit = b.functions.find(e.name());
      if (fit == b.functions.end())
        throw UnboundError("unbound derivative of '" + e.name() + "' of order " + std::to_string(e.order()));
      return nth_derivative(fit->second, x, e.order());
    }
    case Kind::Add: {
      double s = 0;
      for (const auto& t : e.operands()) s += eval_rec(t, b);
      return s;
    }
    case Kind::Mul: {
      double p = 1;
      for (const auto& f : e.operands()) p *= eval_rec(f, b);
      return p;
    }
    case Kind::Pow: {
      double base = eval_rec(e.base(), b);
      const Rational& q = e.exponent();
      if (base == 0 && q < 0) throw DomainError("division by zero");
      if (q.get_den() == 1) return checked(std::pow(base, q.get_d()), "overflow in power");
      if (base < 0) {
        if (q.get_den() % 2 == 0) throw DomainError("even root of negative value");
        double mag = std::pow(-base, q.get_d());
        return q.get_num() % 2 == 0 ? mag : -mag;
      }
      return checked(std::pow(base, q.get_d()), "overflow in power");
    }
    case Kind::Exp:
      return checked(std::exp(eval_rec(e.arg(), b)), "overflow in exp");
    case Kind::Log: {
      double x = eval_rec(e.arg(), b);
      if (!(x > 0)) throw DomainError("log of non-positive value");
      return std::log(x);
    }
    case Kind::Sin:
      return std::sin(eval_rec(e.arg(), b));
    case Kind::Cos:
      return std::cos(eval_rec(e.arg(), b));
  }
  return 0;
}

}  // namespace

double eval(const Expr& e, const Bindings& b) { return checked(eval_rec(e, b), "non-finite value"); }

// Truncation error is O(h^2) in both cases; with these steps the total
// error for smooth f of unit scale is about 1e-10 (order 1) and 1e-8 (order 2).
double fd_derivative(const ScalarFn& f, double x, int order) {
  double scale = std::max(1.0, std::fabs(x));
  double v;
  if (order == 1) {
    double h = 1e-6 * scale;
    v = (f(x + h) - f(x - h)) / (2 * h);
  } else if (order == 2) {
    double h = 1e-4 * scale;
    v = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
  } else {
    throw UnsupportedError("fd_derivative supports orders 1 and 2");
  }
  if (!std::isfinite(v)) throw DomainError("non-finite sample in finite difference");
  return v;
}

}  // namespace cosmo
