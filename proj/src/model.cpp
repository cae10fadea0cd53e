#include "cosmo/model.hpp"

#include "cosmo/calculus.hpp"
#include "cosmo/errors.hpp"

namespace cosmo {

namespace {

Canonical C(const Expr& e) { return Canonical::of(e); }

bool mentions_function(const Expr& e, const std::string& name) {
  bool found = false;
  e.walk([&](const Expr& x) {
    if ((x.is(Kind::Function) || x.is(Kind::Derivative)) && x.name() == name) found = true;
  });
  return found;
}

}  // namespace

CosmoModel::CosmoModel(const ModelSettings& s)
    : settings(s),
      G(s.units == Units::Geometric ? Expr(1) : sym("G")),
      c(s.units == Units::Geometric ? Expr(1) : sym("c")),
      k(sym("k")),
      lambda(s.lambda ? sym("lambda") : Expr(0)),
      metric(Metric::frw(c, k, "R")) {}

std::pair<Expr, Expr> scalar_pressure_density(const CosmoModel& m) {
  Expr dphi = diff(CosmoModel::phi(), CosmoModel::t());
  Expr kinetic = pow(dphi, 2) / (2 * pow(m.c, 2));
  return {kinetic - CosmoModel::V() / 2, kinetic + CosmoModel::V() / 2};
}

Tensor four_velocity(const CosmoModel& m) {
  Tensor u("u", {Valence::Down});
  u.at({0}) = -C(m.c);
  return u;
}

Tensor stress_energy_scalar_direct(const CosmoModel& m) {
  const Metric& g = m.metric;
  Canonical phi = C(CosmoModel::phi());
  std::array<Canonical, kDim> dphi;
  for (int i = 0; i < kDim; ++i) dphi[i] = g.d(phi, i);
  Canonical inner = (contract_covectors(g, dphi, dphi) + C(CosmoModel::V())) * Canonical(Rational(1, 2));
  Tensor t("T1", {Valence::Down, Valence::Down});
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) t.at({i, j}) = dphi[i] * dphi[j] - g.g(i, j) * inner;
  return t;
}

namespace {

Tensor perfect_fluid(const CosmoModel& m, const Canonical& rho, const Canonical& p, const std::string& name) {
  Tensor u = four_velocity(m);
  Tensor t(name, {Valence::Down, Valence::Down});
  Canonical sum = rho + p;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) t.at({i, j}) = sum * u.at({i}) * u.at({j}) + p * m.metric.g(i, j);
  return t;
}

}  // namespace

Tensor stress_energy_scalar_fluid(const CosmoModel& m) {
  auto [p, rho] = scalar_pressure_density(m);
  return perfect_fluid(m, C(rho), C(p), "TT1");
}

Tensor stress_energy_fluid(const CosmoModel& m) { return perfect_fluid(m, C(m.epsilon()), C(m.p()), "T2"); }

Tensor stress_energy_total(const CosmoModel& m) {
  return (stress_energy_scalar_direct(m) + stress_energy_fluid(m)).renamed("T");
}

Tensor einstein_equations(const CosmoModel& m) {
  Tensor g_ij = einstein_tensor(m.metric, C(m.lambda));
  Canonical coupling = C(8 * sym("Pi") * m.G / pow(m.c, 4));
  return (g_ij - stress_energy_total(m).scaled(coupling)).renamed("Ein");
}

Canonical klein_gordon_raw(const CosmoModel& m) {
  return box_scalar(C(CosmoModel::phi()), m.metric) - C(CosmoModel::DV()) * Canonical(Rational(1, 2));
}

const Expr& FriedmannSystem::get(const std::string& name) const {
  for (const auto& e : equations)
    if (e.name == name) return e.residual;
  throw UnsupportedError("no equation named " + name);
}

Expr rewrite_in_hubble_form(const Expr& residual, const CosmoModel& m, bool use_q) {
  const Expr t = CosmoModel::t();
  const Expr R = CosmoModel::R();
  Expr e = simplify(substitute(residual, m.k, CosmoModel::K() * pow(R, 2)));
  if (use_q) {
    e = substitute(e, Expr::derivative("R", t, 2), -2 * pow(CosmoModel::H(), 2) * R * CosmoModel::Q());
    e = simplify(e);
  }
  const Expr dR = Expr::derivative("R", t, 1);
  for (int pass = 0; pass < 8; ++pass) {
    bool has_derivative = false;
    e.walk([&](const Expr& x) {
      if (x.is(Kind::Derivative) && x.name() == "R") has_derivative = true;
    });
    if (!has_derivative) return e;
    e = simplify(substitute(e, dR, CosmoModel::H() * R));
  }
  throw Error("substitution fixpoint not reached in 8 passes");
}

std::pair<Expr, Expr> normalize_residual(const Expr& residual, const Expr& anchor, const Expr& target) {
  Canonical r = Canonical::of(residual);
  Canonical a = Canonical::of(anchor);
  if (!(a.den().is_constant() && a.num().is_single_term()))
    throw UnsupportedError("anchor must be a monomial: " + anchor.str());
  const Monomial& anchor_mono = a.num().leading_monomial();
  auto is_state = [](const Kernel& k) {
    return k->kind == KernelKind::Function || k->kind == KernelKind::Derivative;
  };
  Poly coeff;
  for (const auto& [mono, c] : r.num().terms()) {
    Monomial state, rest;
    for (const auto& ke : mono) (is_state(ke.first) ? state : rest).push_back(ke);
    if (state == anchor_mono) coeff.add_term(rest, c);
  }
  if (coeff.is_zero()) throw UnsupportedError("anchor " + anchor.str() + " does not occur in residual");
  Canonical factor = Canonical::of(target) * Canonical::fraction(r.den(), coeff);
  return {(r * factor).to_expr(), factor.to_expr()};
}

FriedmannSystem reduce_to_friedmann(const CosmoModel& m) {
  const Metric& g = m.metric;
  Tensor ein = einstein_equations(m);
  Tensor mixed = raise_index(ein, 0, g);
  Tensor cons = covariant_divergence(stress_energy_total(m), g, 1);

  const Expr t = CosmoModel::t();
  const Expr H = CosmoModel::H();
  const Expr dphi = Expr::derivative("phi", t, 1);
  const Expr ddphi = Expr::derivative("phi", t, 2);
  const Expr inv_c2 = 1 / pow(m.c, 2);

  struct Job {
    std::string name;
    Canonical raw;
    bool use_q;
    Expr anchor;
    Expr target;
    std::string source;
  };
  std::vector<Job> jobs = {
      {"EcuKG", klein_gordon_raw(m), false, ddphi, inv_c2, "Box(phi) - DV/2"},
      {"Ecunr1", ein.at({0, 0}), false, pow(H, 2), Expr(3), "Ein_tt"},
      {"Ecunr2", mixed.at({1, 1}), false, pow(H, 2), Expr(3), "Ein^r_r"},
      {"Ecunr22", mixed.at({1, 1}), true, pow(H, 2), Expr(1), "Ein^r_r with R'' = -2 H^2 R Q"},
      {"Ecunr3", cons.at({0}), false, ddphi * dphi, inv_c2, "T_t^j_;j"},
  };
  FriedmannSystem out;
  for (const auto& job : jobs) {
    Expr e = rewrite_in_hubble_form(job.raw.to_expr(), m, job.use_q);
    if (mentions_function(e, "R")) throw Error(job.name + ": scale factor survived the rewriting");
    auto [scaled, factor] = normalize_residual(e, job.anchor, job.target);
    out.equations.push_back({job.name, scaled, job.source + ", scaled by " + factor.str()});
  }
  return out;
}

Expr klein_gordon(const CosmoModel& m) {
  Expr e = rewrite_in_hubble_form(klein_gordon_raw(m).to_expr(), m, false);
  const Expr ddphi = Expr::derivative("phi", CosmoModel::t(), 2);
  return normalize_residual(e, ddphi, 1 / pow(m.c, 2)).first;
}

}  // namespace cosmo
