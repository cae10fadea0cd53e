#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cosmo/expr.hpp"
#include "cosmo/model.hpp"

namespace cosmo {

/// Prescribed expansion: a scale factor R(t) or a Hubble function H(t),
/// in geometric units (G = c = 1) and without fluid matter.
struct ExpansionHistory {
  std::optional<Expr> scale_factor;
  std::optional<Expr> hubble;
  Expr k = sym("k");
  Rational t0 = 0;

  static ExpansionHistory from_scale_factor(const Expr& R, const Expr& k = sym("k"), const Rational& t0 = 0);
  /// R is rebuilt as R0 * exp(int_{t0}^t H).
  static ExpansionHistory from_hubble(const Expr& H, const Expr& k = sym("k"), const Rational& t0 = 0);

  /// Scale factor as an expression in t. Throws UnsupportedError when H has
  /// no closed-form antiderivative.
  Expr scale_factor_expr() const;
  Expr hubble_expr() const;
};

struct ReverseOptions {
  int branch = +1;        ///< sign of phi'
  int series_order = 4;   ///< order N of the fallback series
  bool fluid = false;     ///< rejected: reconstruction is scalar-field only
  /// Values for free parameters when a numeric check needs them (default 1).
  std::map<std::string, double> parameters;
};

/// Field history phi(t) and potential V(phi).
struct Reconstruction {
  Expr V_t;
  Expr dotphi2;
  Expr dotphi;
  Expr phi_t;                 ///< closed form, or the truncated series in t
  bool closed_form = true;
  std::string family;         ///< exp, ln, power, constant or series
  int branch = 1;
  int series_order = 0;
  Rational t0 = 0;
  Expr phi0 = sym("phi0");
  std::vector<Expr> phi_series;  ///< coefficients of (t - t0)^n, series mode
  Expr V_psi;                 ///< V in the shifted field psi = phi - phi0
  Expr DV_psi;
  Expr V_phi;                 ///< V in the symbol phi
  Expr DV_phi;
  Expr kg_residual;           ///< EcuKG with the history inserted, DV(t) left free
  Expr DV_t;                  ///< DV(t) solved from EcuKG
};

/// V(t) and phi'(t)^2 by solving Ecunr1, Ecunr2 for V(t), D2Phi(t).
std::pair<Expr, Expr> reconstruct_potential(const ExpansionHistory& h, const ReverseOptions& opt = {});
/// The general solution in H(t), K(t): {V, D2Phi}.
std::pair<Expr, Expr> general_reverse_formulas();

/// Full pipeline. Throws NegativeKineticError when phi'^2 < 0 at t0
/// (H' > K), InversionError when phi(t) cannot be inverted.
Reconstruction reconstruct(const ExpansionHistory& h, const ReverseOptions& opt = {});

/// Adds phi_t (and the series fields) to a reconstruction holding V_t, dotphi2.
void integrate_field(Reconstruction& rec, const ExpansionHistory& h, const ReverseOptions& opt);
/// Adds V_phi, DV_phi, V_psi, DV_psi.
void potential_of_field(Reconstruction& rec, const ExpansionHistory& h, const ReverseOptions& opt);

struct ResidualCheck {
  std::string name;
  bool ok = false;
  std::string method;  ///< canonical, sampling, grid or skipped
  double max_abs = 0;
};

struct ConsistencyReport {
  std::vector<ResidualCheck> residuals;
  bool dv_consistent = false;
  std::string dv_method;
  bool all_ok() const;
};

/// Inserts the reconstruction into the five-equation system.
ConsistencyReport verify_consistency(const Reconstruction& rec, const ExpansionHistory& h,
                                     const ReverseOptions& opt = {});

}  // namespace cosmo
