#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cosmo/evaluate.hpp"
#include "cosmo/model.hpp"

namespace cosmo {

/// State of the flat-or-curved FRW + scalar field system in geometric units.
struct EvolutionState {
  double t = 0;
  double a = 1;  ///< scale factor
  double H = 0;
  double phi = 0;
  double dphi = 0;
};

struct IntegrationConfig {
  double h = 1e-3;
  double t_end = 1;
  double constraint_tol = 1e-6;
  double k = 0;
  ScalarFn V;   ///< V(phi)
  ScalarFn DV;  ///< dV/dphi
  int stride = 1;  ///< keep every stride-th step (the last step is always kept)
};

struct EvolutionSample {
  EvolutionState state;
  double constraint_residual = 0;
};

/// Hamiltonian constraint 3H^2 + 3k/a^2 - 4 pi (phi'^2 + V).
double constraint_residual(const EvolutionState& s, const IntegrationConfig& cfg);

/// H0 >= 0 from the constraint; throws ConstraintError when 4 pi (phi'^2 + V) < 3k/a^2.
double solve_H0(const EvolutionState& s, const IntegrationConfig& cfg);

/// Classical RK4 with fixed step on
///   a' = a H,  H' = -(3H^2 + k/a^2 + 4 pi (phi'^2 - V)) / 2,  phi'' = -3 H phi' - DV / 2,
/// with the constraint monitored at every step. Integrates backwards when
/// t_end < initial.t. Throws ConstraintError (initial residual > 1e-8 or
/// later residual > tolerance) or IntegrationError (a <= 0, non-finite state).
std::vector<EvolutionSample> evolve(const EvolutionState& initial, const IntegrationConfig& cfg);

/// Header t,a,H,phi,dphi,constraint_residual then one row per sample.
std::string to_csv(const std::vector<EvolutionSample>& series);

struct ResidualScanEntry {
  std::string name;
  double max_abs = 0;
  double arg_max = 0;
};

/// Max |residual| of each equation over the grid. `bindings(t)` supplies
/// every function and symbol except t. Throws UnboundError when incomplete.
std::vector<ResidualScanEntry> residual_scan(const FriedmannSystem& system,
                                             const std::function<Bindings(double)>& bindings,
                                             const std::vector<double>& grid);

}  // namespace cosmo
