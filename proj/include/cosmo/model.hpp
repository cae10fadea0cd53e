#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cosmo/canonical.hpp"
#include "cosmo/expr.hpp"
#include "cosmo/tensor.hpp"

namespace cosmo {

enum class Units { Geometric, Symbolic };

struct ModelSettings {
  Units units = Units::Symbolic;
  bool lambda = false;  ///< add lambda*g_ij to the Einstein tensor
  bool fluid = true;    ///< include the perfect fluid p(t), epsilon(t)
};

/// FRW universe with a minimally coupled scalar field phi(t) of potential
/// V(t) and an optional perfect fluid. Time is the symbol t; the scale
/// factor is R(t); DV(t) stands for dV/dphi along the solution.
struct CosmoModel {
  ModelSettings settings;
  Expr G, c, k, lambda;
  Metric metric;

  explicit CosmoModel(const ModelSettings& s = {});

  static Expr t() { return sym("t"); }
  static Expr R() { return fn("R", t()); }
  static Expr phi() { return fn("phi", t()); }
  static Expr V() { return fn("V", t()); }
  static Expr DV() { return fn("DV", t()); }
  static Expr H() { return fn("H", t()); }
  static Expr K() { return fn("K", t()); }
  static Expr Q() { return fn("Q", t()); }
  Expr p() const { return settings.fluid ? fn("p", t()) : Expr(0); }
  Expr epsilon() const { return settings.fluid ? fn("epsilon", t()) : Expr(0); }
};

/// (p_phi, rho_phi) = (phi'^2/(2c^2) - V/2, phi'^2/(2c^2) + V/2).
std::pair<Expr, Expr> scalar_pressure_density(const CosmoModel& m);

/// u_i = -c delta^t_i.
Tensor four_velocity(const CosmoModel& m);
/// d_i phi d_j phi - g_ij (g^ab d_a phi d_b phi + V) / 2.
Tensor stress_energy_scalar_direct(const CosmoModel& m);
/// (rho_phi + p_phi) u_i u_j + p_phi g_ij.
Tensor stress_energy_scalar_fluid(const CosmoModel& m);
/// (epsilon + p) u_i u_j + p g_ij.
Tensor stress_energy_fluid(const CosmoModel& m);
/// T1 + T2.
Tensor stress_energy_total(const CosmoModel& m);
/// G_ij + lambda g_ij - 8 pi G T_ij / c^4 (lambda only when enabled).
Tensor einstein_equations(const CosmoModel& m);
/// Klein-Gordon residual Box(phi) - DV/2 before any rewriting.
Canonical klein_gordon_raw(const CosmoModel& m);

struct FriedmannEquation {
  std::string name;
  Expr residual;
  std::string source;  ///< which component produced it and the scale used
};

/// EcuKG, Ecunr1, Ecunr2, Ecunr22, Ecunr3 in H, Q, K form.
struct FriedmannSystem {
  std::vector<FriedmannEquation> equations;
  const Expr& get(const std::string& name) const;
};

/// Rewrites a residual from R(t) into H, K (and Q when `use_q`): k -> K R^2,
/// R'' -> -2 H^2 R Q (optional), then R' -> H R until no derivative of R is
/// left. Throws Error when 8 passes do not reach the fixpoint.
Expr rewrite_in_hubble_form(const Expr& residual, const CosmoModel& m, bool use_q);

/// Scales `residual` so that the coefficient of the anchor monomial (over the
/// function kernels) equals `target`. Returns the scaled residual and the
/// factor applied.
std::pair<Expr, Expr> normalize_residual(const Expr& residual, const Expr& anchor, const Expr& target);

FriedmannSystem reduce_to_friedmann(const CosmoModel& m);
/// Convenience: the Klein-Gordon entry of the reduced system.
Expr klein_gordon(const CosmoModel& m);

}  // namespace cosmo
