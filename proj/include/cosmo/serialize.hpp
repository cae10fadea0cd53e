#pragma once

#include <json.hpp>

#include "cosmo/expr.hpp"

namespace cosmo {

/// Tree form: {"op": "add", "args": [...]}, {"num": "3/4"}, {"sym": "t"},
/// {"fn": "R", "arg": ...}, {"deriv": "R", "order": 2, "arg": ...},
/// {"op": "pow", "base": ..., "exp": "1/2"}.
nlohmann::json to_json(const Expr& e);
Expr expr_from_json(const nlohmann::json& j);

}  // namespace cosmo
