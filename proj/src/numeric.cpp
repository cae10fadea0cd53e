#include "cosmo/numeric.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "cosmo/errors.hpp"

namespace cosmo {

namespace {

// Internal state (a, H, phi, phi') in extended precision so the RK4
// truncation error stays above round-off down to h ~ 1e-4.
using Real = long double;
using Vec = std::array<Real, 4>;

Vec rhs(const Vec& y, const IntegrationConfig& cfg) {
  const Real a = y[0], H = y[1], dphi = y[3];
  const Real V = cfg.V(static_cast<double>(y[2]));
  const Real DV = cfg.DV(static_cast<double>(y[2]));
  const Real K = cfg.k / (a * a);
  const Real pi = 3.141592653589793238462643383279502884L;
  return {a * H, -(3 * H * H + K + 4 * pi * (dphi * dphi - V)) / 2, dphi, -3 * H * dphi - DV / 2};
}

Vec axpy(const Vec& y, Real s, const Vec& k) {
  return {y[0] + s * k[0], y[1] + s * k[1], y[2] + s * k[2], y[3] + s * k[3]};
}

EvolutionState to_state(Real t, const Vec& y) {
  return {static_cast<double>(t), static_cast<double>(y[0]), static_cast<double>(y[1]), static_cast<double>(y[2]),
          static_cast<double>(y[3])};
}

}  // namespace

double constraint_residual(const EvolutionState& s, const IntegrationConfig& cfg) {
  return 3 * s.H * s.H + 3 * cfg.k / (s.a * s.a) - 4 * M_PI * (s.dphi * s.dphi + cfg.V(s.phi));
}

double solve_H0(const EvolutionState& s, const IntegrationConfig& cfg) {
  double h2 = (4 * M_PI * (s.dphi * s.dphi + cfg.V(s.phi)) - 3 * cfg.k / (s.a * s.a)) / 3;
  if (h2 < 0) throw ConstraintError("no real H0 satisfies the constraint: 4 pi (phi'^2 + V) < 3 k / a^2");
  return std::sqrt(h2);
}

std::vector<EvolutionSample> evolve(const EvolutionState& initial, const IntegrationConfig& cfg) {
  if (!(cfg.h > 0)) throw IntegrationError("step size must be positive");
  if (!cfg.V || !cfg.DV) throw IntegrationError("potential callables are not set");
  double r0 = constraint_residual(initial, cfg);
  if (!(std::fabs(r0) < 1e-8))
    throw ConstraintError("initial state violates the Hamiltonian constraint (residual " + std::to_string(r0) + ")");
  const Real span = static_cast<Real>(cfg.t_end) - initial.t;
  const long steps = std::max(1L, std::lround(std::fabs(static_cast<double>(span)) / cfg.h));
  const Real dt = span / steps;
  const int stride = std::max(1, cfg.stride);

  Vec y{initial.a, initial.H, initial.phi, initial.dphi};
  std::vector<EvolutionSample> out;
  out.push_back({initial, r0});
  for (long n = 1; n <= steps; ++n) {
    Vec k1 = rhs(y, cfg);
    Vec k2 = rhs(axpy(y, dt / 2, k1), cfg);
    Vec k3 = rhs(axpy(y, dt / 2, k2), cfg);
    Vec k4 = rhs(axpy(y, dt, k3), cfg);
    for (int i = 0; i < 4; ++i) y[i] += dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    Real t = initial.t + dt * n;
    EvolutionState s = to_state(t, y);
    if (!std::isfinite(s.a) || !std::isfinite(s.H) || !std::isfinite(s.phi) || !std::isfinite(s.dphi))
      throw IntegrationError("non-finite state at t = " + std::to_string(s.t));
    if (s.a <= 0) throw IntegrationError("scale factor reached zero at t = " + std::to_string(s.t));
    double r = constraint_residual(s, cfg);
    if (!(std::fabs(r) <= cfg.constraint_tol))
      throw ConstraintError("constraint residual " + std::to_string(r) + " exceeds tolerance at t = " +
                            std::to_string(s.t));
    if (n % stride == 0 || n == steps) out.push_back({s, r});
  }
  return out;
}

std::string to_csv(const std::vector<EvolutionSample>& series) {
  // Shortest text that reads back to the same double.
  auto field = [](std::string& out, double v, char sep) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
    out += sep;
  };
  std::string out = "t,a,H,phi,dphi,constraint_residual\n";
  for (const auto& x : series) {
    field(out, x.state.t, ',');
    field(out, x.state.a, ',');
    field(out, x.state.H, ',');
    field(out, x.state.phi, ',');
    field(out, x.state.dphi, ',');
    field(out, x.constraint_residual, '\n');
  }
  return out;
}

std::vector<ResidualScanEntry> residual_scan(const FriedmannSystem& system,
                                             const std::function<Bindings(double)>& bindings,
                                             const std::vector<double>& grid) {
  std::vector<ResidualScanEntry> out;
  for (const auto& eq : system.equations) out.push_back({eq.name, 0, grid.empty() ? 0 : grid.front()});
  for (double t : grid) {
    Bindings b = bindings(t);
    b.symbols["t"] = t;
    for (std::size_t i = 0; i < system.equations.size(); ++i) {
      double v = std::fabs(eval(system.equations[i].residual, b));
      if (v > out[i].max_abs) {
        out[i].max_abs = v;
        out[i].arg_max = t;
      }
    }
  }
  return out;
}

}  // namespace cosmo
