#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>

#include "cosmo/expr.hpp"

namespace cosmo {

using ScalarFn = std::function<double(double)>;

/// Numeric values for the free names of an expression.
struct Bindings {
  std::map<std::string, double> symbols;
  std::map<std::string, ScalarFn> functions;
  /// Explicit derivatives by (function name, order). Missing ones are
  /// approximated by central differences of the bound function.
  std::map<std::pair<std::string, int>, ScalarFn> derivatives;
};

/// Evaluates in double precision. Pi is predefined unless bound.
/// Throws UnboundError for a free name and DomainError outside the domain.
double eval(const Expr& e, const Bindings& b);

/// Central finite-difference derivative of order 1 or 2.
double fd_derivative(const ScalarFn& f, double x, int order = 1);

}  // namespace cosmo
