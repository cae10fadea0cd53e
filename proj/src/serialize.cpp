#include "cosmo/serialize.hpp"

#include "cosmo/errors.hpp"

namespace cosmo {

using nlohmann::json;

namespace {

const char* op_name(Kind k) {
  switch (k) {
    case Kind::Add: return "add";
    case Kind::Mul: return "mul";
    case Kind::Exp: return "exp";
    case Kind::Log: return "ln";
    case Kind::Sin: return "sin";
    case Kind::Cos: return "cos";
    default: return "";
  }
}

Rational rational_of(const json& j) {
  if (!j.is_string()) throw SessionError("expected a rational string");
  Rational q;
  if (q.set_str(j.get<std::string>(), 10) != 0) throw SessionError("malformed rational " + j.get<std::string>());
  q.canonicalize();
  return q;
}

}  // namespace

json to_json(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
      return {{"num", to_string(e.value())}};
    case Kind::Symbol:
      return {{"sym", e.name()}};
    case Kind::Function:
      return {{"fn", e.name()}, {"arg", to_json(e.arg())}};
    case Kind::Derivative:
      return {{"deriv", e.name()}, {"order", e.order()}, {"arg", to_json(e.arg())}};
    case Kind::Pow:
      return {{"op", "pow"}, {"base", to_json(e.base())}, {"exp", to_string(e.exponent())}};
    case Kind::Add:
    case Kind::Mul: {
      json args = json::array();
      for (const auto& x : e.operands()) args.push_back(to_json(x));
      return {{"op", op_name(e.kind())}, {"args", args}};
    }
    case Kind::Exp:
    case Kind::Log:
    case Kind::Sin:
    case Kind::Cos:
      return {{"op", op_name(e.kind())}, {"arg", to_json(e.arg())}};
  }
  return {};
}

Expr expr_from_json(const json& j) {
  try {
    if (j.contains("num")) return Expr(rational_of(j.at("num")));
    if (j.contains("sym")) return Expr::symbol(j.at("sym").get<std::string>());
    if (j.contains("fn")) return Expr::function(j.at("fn").get<std::string>(), expr_from_json(j.at("arg")));
    if (j.contains("deriv"))
      return Expr::derivative(j.at("deriv").get<std::string>(), expr_from_json(j.at("arg")), j.at("order").get<int>());
    std::string op = j.at("op").get<std::string>();
    if (op == "pow") return pow(expr_from_json(j.at("base")), rational_of(j.at("exp")));
    if (op == "add" || op == "mul") {
      std::vector<Expr> xs;
      for (const auto& a : j.at("args")) xs.push_back(expr_from_json(a));
      return op == "add" ? Expr::sum(std::move(xs)) : Expr::product(std::move(xs));
    }
    Expr a = expr_from_json(j.at("arg"));
    if (op == "exp") return Expr::exp(a);
    if (op == "ln") return Expr::log(a);
    if (op == "sin") return Expr::sin(a);
    if (op == "cos") return Expr::cos(a);
    throw SessionError("unknown operator " + op);
  } catch (const json::exception& ex) {
    throw SessionError(std::string("malformed expression tree: ") + ex.what());
  }
}

}  // namespace cosmo
