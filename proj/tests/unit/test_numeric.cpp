#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cosmo/calculus.hpp"
#include "cosmo/errors.hpp"
#include "cosmo/numeric.hpp"
#include "cosmo/parser.hpp"
#include "cosmo/reverse.hpp"

using namespace cosmo;

namespace {

const double kPi = std::acos(-1.0);

IntegrationConfig flat_de_sitter(double w, double h) {
  IntegrationConfig cfg;
  cfg.h = h;
  cfg.t_end = 1;
  cfg.V = [w](double) { return 3 * w * w / (4 * kPi); };
  cfg.DV = [](double) { return 0.0; };
  return cfg;
}

// V(phi) = 3/(4 pi) + 2 phi^2 and the matching closed-form initial data (k = w = 1, phi0 = 0).
IntegrationConfig closed_de_sitter(double h, double t_end = 1) {
  IntegrationConfig cfg;
  cfg.h = h;
  cfg.t_end = t_end;
  cfg.k = 1;
  cfg.V = [](double p) { return 3 / (4 * kPi) + 2 * p * p; };
  cfg.DV = [](double p) { return 4 * p; };
  return cfg;
}

EvolutionState closed_de_sitter_initial() {
  EvolutionState s;
  s.a = 1;
  s.H = 1;
  s.phi = -1 / (2 * std::sqrt(kPi));
  s.dphi = 1 / (2 * std::sqrt(kPi));
  return s;
}

void bind(Bindings& b, const std::string& name, const Expr& e) {
  const Expr t = sym("t");
  const std::map<std::string, double> params = b.symbols;
  auto as_fn = [&params](const Expr& f) {
    return ScalarFn([f, params](double s) {
      Bindings at;
      at.symbols = params;
      at.symbols["t"] = s;
      return eval(f, at);
    });
  };
  b.functions[name] = as_fn(e);
  b.derivatives[{name, 1}] = as_fn(diff(e, t));
  b.derivatives[{name, 2}] = as_fn(diff(e, t, 2));
}

FriedmannSystem geometric_system() {
  ModelSettings s;
  s.units = Units::Geometric;
  s.fluid = false;
  return reduce_to_friedmann(CosmoModel(s));
}

// Bindings for the Friedmann system from a reconstruction at parameter values.
std::function<Bindings(double)> reconstruction_bindings(const Reconstruction& rec, const ExpansionHistory& h,
                                                        std::map<std::string, double> params) {
  Bindings b;
  b.symbols = params;
  const Expr H = h.hubble_expr();
  const Expr R = h.scale_factor_expr();
  bind(b, "H", H);
  bind(b, "K", h.k / pow(R, 2));
  bind(b, "Q", -diff(R, sym("t"), 2) / (2 * pow(H, 2) * R));
  bind(b, "phi", rec.phi_t);
  bind(b, "V", rec.V_t);
  bind(b, "DV", substitute(rec.DV_phi, sym("phi"), rec.phi_t));
  return [b](double) { return b; };
}

}  // namespace

TEST_CASE("static Minkowski state stays put") {
  IntegrationConfig cfg;
  cfg.V = [](double) { return 0.0; };
  cfg.DV = [](double) { return 0.0; };
  EvolutionState s;
  const auto series = evolve(s, cfg);
  REQUIRE(series.size() == 1001);
  for (const auto& x : series) {
    CHECK(x.state.a == 1);
    CHECK(x.state.H == 0);
    CHECK(x.state.phi == 0);
    CHECK(x.state.dphi == 0);
  }
}

TEST_CASE("flat de Sitter is exact to integrator order") {
  for (double w : {1.0, 0.5}) {
    EvolutionState s;
    s.H = w;
    const auto series = evolve(s, flat_de_sitter(w, 1e-3));
    for (const auto& x : series) CHECK(x.state.H == doctest::Approx(w).epsilon(1e-14));
    CHECK(std::fabs(series.back().state.a - std::exp(w)) < 1e-8);
  }
}

TEST_CASE("closed de Sitter round trip") {
  const auto series = evolve(closed_de_sitter_initial(), closed_de_sitter(1e-3));
  double worst = 0, constraint = 0;
  for (const auto& x : series) {
    worst = std::max(worst, std::fabs(x.state.a / std::exp(x.state.t) - 1));
    constraint = std::max(constraint, std::fabs(x.constraint_residual));
  }
  CHECK(worst < 1e-6);
  CHECK(constraint < 1e-7);
}

TEST_CASE("global error is fourth order") {
  std::vector<double> hs{1e-2, 5e-3, 2.5e-3}, errs;
  for (double h : hs) {
    EvolutionState s;
    s.H = 1;
    errs.push_back(std::fabs(evolve(s, flat_de_sitter(1, h)).back().state.a - std::exp(1.0)));
  }
  for (std::size_t i = 0; i + 1 < hs.size(); ++i) {
    const double slope = std::log(errs[i] / errs[i + 1]) / std::log(hs[i] / hs[i + 1]);
    CHECK(slope == doctest::Approx(4).epsilon(0.05));
  }
}

TEST_CASE("constraint drift shrinks at least eightfold when h halves") {
  auto drift = [](double h) {
    return std::fabs(evolve(closed_de_sitter_initial(), closed_de_sitter(h, 2)).back().constraint_residual);
  };
  const double coarse = drift(0.04), fine = drift(0.02);
  CHECK(coarse > 0);
  CHECK(coarse / fine >= 8);
}

TEST_CASE("time reversal") {
  const auto forward = evolve(closed_de_sitter_initial(), closed_de_sitter(1e-3));
  IntegrationConfig back = closed_de_sitter(1e-3);
  back.t_end = 0;
  const auto backward = evolve(forward.back().state, back);
  const EvolutionState& end = backward.back().state;
  const EvolutionState start = closed_de_sitter_initial();
  CHECK(std::fabs(end.t) < 1e-12);
  CHECK(std::fabs(end.a - start.a) < 1e-7);
  CHECK(std::fabs(end.H - start.H) < 1e-7);
  CHECK(std::fabs(end.phi - start.phi) < 1e-7);
  CHECK(std::fabs(end.dphi - start.dphi) < 1e-7);
}

TEST_CASE("constraint handling") {
  EvolutionState s;
  s.H = 2;
  CHECK_THROWS_AS(evolve(s, flat_de_sitter(1, 1e-3)), ConstraintError);
  IntegrationConfig cfg = flat_de_sitter(1, 1e-3);
  s.H = 0;
  CHECK(solve_H0(s, cfg) == doctest::Approx(1).epsilon(1e-14));
  cfg.k = 10;
  CHECK_THROWS_AS(solve_H0(s, cfg), ConstraintError);
  CHECK(constraint_residual(closed_de_sitter_initial(), closed_de_sitter(1e-3)) == doctest::Approx(0).epsilon(1e-15));
}

TEST_CASE("collapse is reported") {
  // Closed universe with no potential: a fast-rolling field and H < 0 crunch before t = 5.
  IntegrationConfig cfg;
  cfg.k = 1;
  cfg.h = 1e-2;
  cfg.t_end = 5;
  cfg.V = [](double) { return 0.0; };
  cfg.DV = [](double) { return 0.0; };
  EvolutionState s;
  s.H = -1;
  s.dphi = std::sqrt(6 / (4 * kPi));
  CHECK_THROWS_AS(evolve(s, cfg), IntegrationError);
}

TEST_CASE("CSV output and stride") {
  EvolutionState s;
  s.H = 1;
  IntegrationConfig cfg = flat_de_sitter(1, 0.1);
  cfg.stride = 4;
  const auto series = evolve(s, cfg);
  CHECK(series.size() == 4);  // steps 0, 4, 8 and the final step 10
  CHECK(series.back().state.t == doctest::Approx(1));
  const std::string csv = to_csv(series);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,a,H,phi,dphi,constraint_residual");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("residual scan on the closed-form de Sitter reconstruction") {
  const auto h = ExpansionHistory::from_scale_factor(parse("exp(w*t)"), sym("k"));
  const Reconstruction rec = reconstruct(h);
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.1 * i);
  const auto scan = residual_scan(geometric_system(), reconstruction_bindings(rec, h, {{"k", 1}, {"w", 1}, {"phi0", 0.3}}), grid);
  REQUIRE(scan.size() == 5);
  for (const auto& e : scan) CHECK_MESSAGE(e.max_abs < 1e-12, e.name);
}

TEST_CASE("residual scan flags a non-solution") {
  Bindings b;
  auto c = [](double v) { return ScalarFn([v](double) { return v; }); };
  b.functions = {{"H", c(1)}, {"K", c(0)}, {"Q", c(0)}, {"phi", [](double t) { return t * t; }}, {"V", c(0)}, {"DV", c(0)}};
  b.derivatives[{"phi", 1}] = [](double t) { return 2 * t; };
  b.derivatives[{"phi", 2}] = c(2);
  const auto scan = residual_scan(geometric_system(), [b](double) { return b; }, {0.0, 0.5, 1.0});
  for (const auto& e : scan) {
    if (e.name == "EcuKG") {
      CHECK(e.max_abs == doctest::Approx(2 + 3 * 2));
      CHECK(e.arg_max == 1.0);
    }
    if (e.name == "Ecunr1") CHECK(e.max_abs > 1);
  }
  Bindings partial;
  CHECK_THROWS_AS(residual_scan(geometric_system(), [partial](double) { return partial; }, {0.0}), UnboundError);
}

TEST_CASE("residual scan on the series reconstruction") {
  const auto h = ExpansionHistory::from_scale_factor(parse("exp(t^2/2)"), Expr(2));
  std::vector<double> grid;
  // Q = -R''/(2 H^2 R) is singular where H(t0) = 0, so t0 itself is left out.
  for (int i = -10; i <= 10; ++i)
    if (i != 0) grid.push_back(0.01 * i);
  for (int order : {4, 6}) {
    ReverseOptions opt;
    opt.series_order = order;
    const Reconstruction rec = reconstruct(h, opt);
    const auto scan = residual_scan(geometric_system(), reconstruction_bindings(rec, h, {{"phi0", 0}}), grid);
    for (const auto& e : scan) {
      const double tol = order == 4 && e.name == "EcuKG" ? 1e-5 : 1e-6;
      CHECK_MESSAGE(e.max_abs < tol, e.name << " at order " << order << ": " << e.max_abs);
    }
  }
}
