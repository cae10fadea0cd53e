#include <doctest.h>

#include <cmath>

#include "cosmo/calculus.hpp"
#include "cosmo/canonical.hpp"
#include "cosmo/errors.hpp"
#include "cosmo/evaluate.hpp"
#include "cosmo/parser.hpp"
#include "cosmo/reverse.hpp"

using namespace cosmo;

namespace {

bool same(const Expr& a, const std::string& b) { return Canonical::of(a) == Canonical::of(parse(b)); }

const Expr t = sym("t");
const Expr phi = sym("phi");

void check_defining_identities(const Reconstruction& rec) {
  CHECK(is_zero(pow(diff(rec.phi_t, t), 2) - rec.dotphi2));
  CHECK(is_zero(diff(rec.V_phi, phi) - rec.DV_phi));
  CHECK(is_zero(substitute(rec.V_phi, phi, rec.phi_t) - rec.V_t));
}

}  // namespace

TEST_CASE("general reverse formulas") {
  const auto [V, D2] = general_reverse_formulas();
  CHECK(same(V, "(fderiv(H,1,t) + 3*H(t)^2 + 2*K(t))/(4*Pi)"));
  CHECK(same(D2, "(K(t) - fderiv(H,1,t))/(4*Pi)"));
}

TEST_CASE("de Sitter") {
  const auto h = ExpansionHistory::from_scale_factor(parse("exp(w*t)"), sym("k"));
  const Reconstruction rec = reconstruct(h);
  CHECK(rec.closed_form);
  CHECK(rec.family == "exp");
  CHECK(same(rec.V_t, "3*w^2/(4*Pi) + k*exp(-2*w*t)/(2*Pi)"));
  CHECK(same(rec.dotphi2, "k*exp(-2*w*t)/(4*Pi)"));
  CHECK(same(rec.phi_t, "-sqrt(k)*exp(-w*t)/(2*sqrt(Pi)*w) + phi0"));
  CHECK(same(rec.V_phi, "3*w^2/(4*Pi) + 2*w^2*(phi - phi0)^2"));
  CHECK(same(rec.DV_phi, "4*w^2*(phi - phi0)"));
  CHECK(same(rec.kg_residual, "DV(t)/2 + sqrt(k)*w*exp(-w*t)/sqrt(Pi)"));
  check_defining_identities(rec);
  const ConsistencyReport rep = verify_consistency(rec, h);
  CHECK(rep.all_ok());
  CHECK(rep.dv_consistent);
  CHECK(rep.residuals.size() == 5);
  for (const auto& r : rep.residuals) CHECK_MESSAGE(r.method == "canonical", r.name);
}

TEST_CASE("de Sitter with a scale R0 and a Hubble-function input agree") {
  const Reconstruction a = reconstruct(ExpansionHistory::from_scale_factor(parse("R0*exp(w*t)"), sym("k")));
  const Reconstruction b = reconstruct(ExpansionHistory::from_hubble(sym("w"), sym("k")));
  CHECK(is_zero(a.V_t - b.V_t));
  CHECK(same(a.V_t, "3*w^2/(4*Pi) + k*exp(-2*w*t)/(2*Pi*R0^2)"));
  CHECK(same(a.V_phi, "3*w^2/(4*Pi) + 2*w^2*(phi - phi0)^2"));
}

TEST_CASE("flat de Sitter freezes the field") {
  const auto h = ExpansionHistory::from_hubble(sym("w"), Expr(0));
  const Reconstruction rec = reconstruct(h);
  CHECK(rec.family == "constant");
  CHECK(same(rec.V_t, "3*w^2/(4*Pi)"));
  CHECK(is_zero(rec.dotphi2));
  CHECK(same(rec.phi_t, "phi0"));
  CHECK(same(rec.V_phi, "3*w^2/(4*Pi)"));
  CHECK(is_zero(rec.DV_phi));
  CHECK(verify_consistency(rec, h).all_ok());
}

TEST_CASE("power-law expansion") {
  for (int p : {2, 3, 5}) {
    const auto h = ExpansionHistory::from_scale_factor(pow(t, p), Expr(0), 1);
    const auto [V, D2] = reconstruct_potential(h);
    CHECK(same(V, "(3*" + std::to_string(p * p) + " - " + std::to_string(p) + ")/(4*Pi*t^2)"));
    CHECK(same(D2, std::to_string(p) + "/(4*Pi*t^2)"));
    // Against the general formula fed with finite-difference H and H'.
    const auto H = [p](double s) { return fd_derivative([p](double u) { return std::pow(u, p); }, s) / std::pow(s, p); };
    for (double s : {1.0, 2.0}) {
      Bindings b;
      b.symbols["t"] = s;
      const double want = (fd_derivative(H, s) + 3 * H(s) * H(s)) / (4 * std::acos(-1.0));
      CHECK(eval(V, b) == doctest::Approx(want).epsilon(1e-5));
    }
  }
  const auto h = ExpansionHistory::from_scale_factor(pow(t, 2), Expr(0), 1);
  const Reconstruction rec = reconstruct(h);
  CHECK(rec.family == "ln");
  CHECK(same(rec.phi_t, "sqrt(1/(2*Pi))*ln(t) + phi0"));
  CHECK(same(rec.V_phi, "5/(2*Pi)*exp(-sqrt(8*Pi)*(phi - phi0))"));
  check_defining_identities(rec);
  CHECK(verify_consistency(rec, h).all_ok());
}

TEST_CASE("power-law field with a power-law inversion") {
  // H = -t^2/2 gives phi'^2 = t/(4 pi), so phi - phi0 grows like t^(3/2).
  const auto h = ExpansionHistory::from_hubble(parse("-t^2/2"), Expr(0), 1);
  const Reconstruction rec = reconstruct(h);
  CHECK(rec.family == "power");
  CHECK(same(rec.phi_t, "t^(3/2)/(3*sqrt(Pi)) + phi0"));
  check_defining_identities(rec);
  CHECK(verify_consistency(rec, h).all_ok());
}

TEST_CASE("contracting open universe needs a negative kinetic term") {
  const auto h = ExpansionHistory::from_scale_factor(parse("R0*exp(-w*t)"), Expr(-1));
  CHECK_THROWS_AS(reconstruct(h), NegativeKineticError);
  ReverseOptions opt;
  opt.fluid = true;
  CHECK_THROWS(reconstruct(ExpansionHistory::from_scale_factor(parse("exp(w*t)")), opt));
}

TEST_CASE("branch flip") {
  const auto h = ExpansionHistory::from_scale_factor(parse("exp(w*t)"), sym("k"));
  ReverseOptions minus;
  minus.branch = -1;
  const Reconstruction a = reconstruct(h);
  const Reconstruction b = reconstruct(h, minus);
  CHECK(is_zero(a.phi_t + b.phi_t - 2 * sym("phi0")));
  CHECK(is_zero(substitute(b.V_phi, phi, b.phi_t) - a.V_t));
  check_defining_identities(b);
}

TEST_CASE("series reconstruction") {
  const auto h = ExpansionHistory::from_scale_factor(parse("exp(t^2/2)"), Expr(2));
  const Reconstruction rec = reconstruct(h);
  CHECK_FALSE(rec.closed_form);
  CHECK(rec.family == "series");
  CHECK(rec.series_order == 4);
  CHECK(rec.phi_series.size() == 6);
  // phi'^2 agrees with the series to order 4 about t0.
  const auto exact = taylor_coefficients(rec.dotphi2, t, Expr(0), 4);
  const auto approx = taylor_coefficients(pow(diff(rec.phi_t, t), 2), t, Expr(0), 4);
  for (std::size_t i = 0; i < exact.size(); ++i) CHECK(is_zero(exact[i] - approx[i]));
  const auto v = taylor_coefficients(diff(rec.V_phi, phi), phi, sym("phi0"), 3);
  const auto dv = taylor_coefficients(rec.DV_phi, phi, sym("phi0"), 3);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(is_zero(v[i] - dv[i]));

  const ConsistencyReport rep = verify_consistency(rec, h);
  for (const auto& r : rep.residuals) {
    CHECK(r.method == "grid");
    CHECK_MESSAGE(r.max_abs < (r.name == "EcuKG" ? 1e-5 : 1e-6), r.name);
  }

  ReverseOptions six;
  six.series_order = 6;
  const Reconstruction fine = reconstruct(h, six);
  const ConsistencyReport rep6 = verify_consistency(fine, h, six);
  CHECK(rep6.all_ok());
  for (const auto& r : rep6.residuals) CHECK_MESSAGE(r.max_abs < 1e-6, r.name);
}

TEST_CASE("series inversion needs a moving field at t0") {
  const auto h = ExpansionHistory::from_scale_factor(parse("exp(t^2/2)"), Expr(1));
  CHECK_THROWS_AS(reconstruct(h), InversionError);
}

TEST_CASE("expansion history accessors") {
  const auto h = ExpansionHistory::from_hubble(parse("2/t"), Expr(0), 1);
  CHECK(same(h.scale_factor_expr(), "R0*t^2"));
  CHECK(same(h.hubble_expr(), "2/t"));
  const auto g = ExpansionHistory::from_scale_factor(parse("t^3"), Expr(0), 1);
  CHECK(same(g.hubble_expr(), "3/t"));
  CHECK_THROWS_AS(ExpansionHistory::from_hubble(parse("exp(-t^2)"), Expr(0)).scale_factor_expr(), UnsupportedError);
}
