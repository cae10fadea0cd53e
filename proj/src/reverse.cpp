#include "cosmo/reverse.hpp"

#include <cmath>

#include "cosmo/calculus.hpp"
#include "cosmo/canonical.hpp"
#include "cosmo/errors.hpp"
#include "cosmo/evaluate.hpp"
#include "cosmo/solve.hpp"

namespace cosmo {

namespace {

const Expr& T() {
  static const Expr t = sym("t");
  return t;
}

const FriedmannSystem& geometric_system() {
  static const FriedmannSystem sys = reduce_to_friedmann(CosmoModel({Units::Geometric, false, false}));
  return sys;
}

Canonical C(const Expr& e) { return Canonical::of(e); }

/// Replaces H(t), K(t), Q(t) by their values along the history.
Expr insert_history(const Expr& e, const ExpansionHistory& h) {
  Expr R = h.scale_factor_expr();
  Expr H = h.hubble_expr();
  Expr out = substitute(e, CosmoModel::H(), H);
  out = substitute(out, CosmoModel::K(), h.k / pow(R, 2));
  bool has_q = false;
  out.walk([&](const Expr& x) {
    if (x.is(Kind::Function) && x.name() == "Q") has_q = true;
  });
  if (has_q) out = substitute(out, CosmoModel::Q(), -diff(R, T(), 2) / (2 * pow(H, 2) * R));
  return out;
}

double symbol_value(const ReverseOptions& opt, const std::string& name) {
  auto it = opt.parameters.find(name);
  return it == opt.parameters.end() ? 1.0 : it->second;
}

Bindings numeric_bindings(const Expr& e, const ReverseOptions& opt) {
  Bindings b;
  e.walk([&](const Expr& x) {
    if (x.is(Kind::Symbol) && x.name() != "t" && x.name() != "Pi") b.symbols[x.name()] = symbol_value(opt, x.name());
  });
  return b;
}

/// Rejects histories whose kinetic term is negative at t0.
void check_kinetic(const Expr& dotphi2, const ExpansionHistory& h, const ReverseOptions& opt) {
  Canonical at = C(substitute(dotphi2, T(), Expr(h.t0)));
  if (at.is_zero()) return;
  auto fail = [&]() {
    throw NegativeKineticError("negative kinetic term phi'^2 = " + at.str() +
                               " at t0: H' > K, the expansion cannot be driven by a real scalar field");
  };
  if (auto v = at.constant_value()) {
    if (*v < 0) fail();
    return;
  }
  std::vector<Kernel> leaves;
  for (const auto& k : at.all_kernels())
    if (k->kind == KernelKind::Symbol && k->name != "Pi") leaves.push_back(k);
  SamplingPolicy policy;
  SplitMix64 rng(policy.seed);
  for (int i = 0; i < policy.points; ++i) {
    std::map<Kernel, double, KernelLess> values;
    for (const auto& k : leaves) {
      double draw = rng.uniform(policy.lo, policy.hi);
      auto it = opt.parameters.find(k->name);
      values[k] = it == opt.parameters.end() ? draw : it->second;
    }
    try {
      double v = evaluate(at, [&](const Kernel& k) { return values.at(k); });
      if (v < -1e-12) fail();
    } catch (const DomainError&) {
    }
  }
}

// Truncated power series with canonical coefficients.
using Series = std::vector<Canonical>;

Series series_mul(const Series& a, const Series& b, std::size_t n) {
  Series out(n + 1);
  for (std::size_t i = 0; i < a.size() && i <= n; ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size() && i + j <= n; ++j)
      if (!b[j].is_zero()) out[i + j] = out[i + j] + a[i] * b[j];
  }
  return out;
}

Expr series_expr(const Series& s, const Expr& var) {
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!s[i].is_zero()) terms.push_back(s[i].to_expr() * pow(var, Rational(static_cast<long>(i))));
  return Expr::sum(std::move(terms));
}

Series taylor(const Expr& e, const Rational& t0, int order) {
  Series out;
  for (const auto& c : taylor_coefficients(e, T(), Expr(t0), order)) out.push_back(C(c));
  return out;
}

/// Coefficients of s(psi) with psi = sum a_i s^i, a_0 = 0, to order n.
Series revert(const Series& a, std::size_t n) {
  if (a.size() < 2 || a[1].is_zero())
    throw InversionError("series inversion impossible: phi'(t0) = 0 gives zero radius");
  Canonical inv = a[1].inverse();
  Series s(n + 1);
  s[1] = inv;
  for (std::size_t iter = 1; iter < n; ++iter) {
    // s = (psi - sum_{i>=2} a_i s^i) / a_1
    Series acc(n + 1);
    Series power = series_mul(s, s, n);
    for (std::size_t i = 2; i < a.size() && i <= n; ++i) {
      for (std::size_t j = 0; j <= n; ++j)
        if (!power[j].is_zero()) acc[j] = acc[j] + a[i] * power[j];
      power = series_mul(power, s, n);
    }
    Series next(n + 1);
    next[1] = inv;
    for (std::size_t j = 2; j <= n; ++j) next[j] = -(acc[j] * inv);
    s = next;
  }
  return s;
}

// phi' to order N gives phi - phi0 to order N + 1, so V(psi) is carried to
// order N + 1 and DV(psi) to order N.
void series_potential(Reconstruction& rec, const ExpansionHistory& h, const ReverseOptions& opt) {
  const auto n = static_cast<std::size_t>(opt.series_order) + 1;
  Series field(n + 1);  // phi - phi0 in powers of s = t - t0
  Series rate = taylor(rec.dotphi, h.t0, opt.series_order);
  for (std::size_t j = 0; j < rate.size(); ++j) field[j + 1] = rate[j] / Canonical(static_cast<int>(j + 1));
  Series s_of_psi = revert(field, n);
  Series v = taylor(rec.V_t, h.t0, static_cast<int>(n));
  Series composed(n + 1);
  Series power(n + 1);
  power[0] = Canonical(1);
  for (std::size_t j = 0; j <= n; ++j) {
    for (std::size_t i = 0; i <= n; ++i)
      if (!power[i].is_zero()) composed[i] = composed[i] + v[j] * power[i];
    power = series_mul(power, s_of_psi, n);
  }
  Series dv(n + 1);
  for (std::size_t i = 1; i <= n; ++i) dv[i - 1] = composed[i] * Canonical(static_cast<int>(i));
  Expr psi = sym("psi");
  rec.V_psi = series_expr(composed, psi);
  rec.DV_psi = series_expr(dv, psi);
}

}  // namespace

// ---------------------------------------------------------------------------

ExpansionHistory ExpansionHistory::from_scale_factor(const Expr& R, const Expr& k, const Rational& t0) {
  ExpansionHistory h;
  h.scale_factor = R;
  h.k = k;
  h.t0 = t0;
  return h;
}

ExpansionHistory ExpansionHistory::from_hubble(const Expr& H, const Expr& k, const Rational& t0) {
  ExpansionHistory h;
  h.hubble = H;
  h.k = k;
  h.t0 = t0;
  return h;
}

Expr ExpansionHistory::scale_factor_expr() const {
  if (scale_factor) return *scale_factor;
  auto integral = antiderivative(*hubble, T());
  if (!integral) throw UnsupportedError("the Hubble function has no closed-form integral; pass a scale factor");
  Expr at_t0 = substitute(*integral, T(), Expr(t0));
  return simplify(sym("R0") * Expr::exp(*integral - at_t0));
}

Expr ExpansionHistory::hubble_expr() const {
  if (hubble) return *hubble;
  return simplify(diff(*scale_factor, T()) / *scale_factor);
}

std::pair<Expr, Expr> general_reverse_formulas() {
  const FriedmannSystem& sys = geometric_system();
  Expr dphi = Expr::derivative("phi", T(), 1);
  Expr D2Phi = fn("D2Phi", T());
  Expr e1 = substitute(sys.get("Ecunr1"), pow(dphi, 2), D2Phi);
  Expr e2 = substitute(sys.get("Ecunr2"), pow(dphi, 2), D2Phi);
  auto sol = solve_linear({e1, e2}, {CosmoModel::V(), D2Phi});
  return {sol.at(CosmoModel::V()), sol.at(D2Phi)};
}

std::pair<Expr, Expr> reconstruct_potential(const ExpansionHistory& h, const ReverseOptions& opt) {
  if (opt.fluid) throw UnsupportedError("reconstruction with fluid matter is not supported");
  auto [V, D2] = general_reverse_formulas();
  return {simplify(insert_history(V, h)), simplify(insert_history(D2, h))};
}

void integrate_field(Reconstruction& rec, const ExpansionHistory& h, const ReverseOptions& opt) {
  rec.branch = opt.branch >= 0 ? 1 : -1;
  rec.t0 = h.t0;
  Canonical k2 = C(rec.dotphi2);
  if (k2.is_zero()) {
    rec.dotphi = Expr(0);
    rec.phi_t = rec.phi0;
    rec.closed_form = true;
    rec.family = "constant";
    return;
  }
  rec.dotphi = (Canonical(rec.branch) * k2.pow(Rational(1, 2))).to_expr();
  if (auto F = antiderivative(rec.dotphi, T())) {
    rec.phi_t = simplify(*F + rec.phi0);
    rec.closed_form = true;
    return;
  }
  rec.closed_form = false;
  rec.family = "series";
  rec.series_order = opt.series_order;
  Series rate = taylor(rec.dotphi, h.t0, opt.series_order);
  Expr s = T() - Expr(h.t0);
  rec.phi_series.assign(1, rec.phi0);
  std::vector<Expr> terms{rec.phi0};
  for (std::size_t j = 0; j < rate.size(); ++j) {
    Expr c = (rate[j] / Canonical(static_cast<int>(j + 1))).to_expr();
    rec.phi_series.push_back(c);
    terms.push_back(c * pow(s, Rational(static_cast<long>(j + 1))));
  }
  rec.phi_t = Expr::sum(std::move(terms));
}

void potential_of_field(Reconstruction& rec, const ExpansionHistory& h, const ReverseOptions& opt) {
  const Expr psi = sym("psi");
  const Kernel t = symbol_kernel("t");
  auto finish = [&]() {
    Expr shift = sym("phi") - rec.phi0;
    rec.V_phi = simplify(substitute(rec.V_psi, psi, shift));
    rec.DV_phi = simplify(substitute(rec.DV_psi, psi, shift));
  };
  if (rec.family == "constant") {
    Canonical v = C(rec.V_t);
    if (v.depends_on(t)) throw InversionError("frozen field with a time-dependent potential");
    rec.V_psi = v.to_expr();
    rec.DV_psi = Expr(0);
    finish();
    return;
  }
  if (!rec.closed_form) {
    series_potential(rec, h, opt);
    finish();
    return;
  }
  Canonical F = C(rec.phi_t) - C(rec.phi0);
  Canonical dF = F.derivative(t);
  Canonical ddF = dF.derivative(t);
  Canonical tc = Canonical::of_kernel(t);
  Canonical P = C(psi);
  std::optional<Canonical> t_of_psi;

  Canonical ratio = ddF / dF;
  if (!ratio.is_zero() && !ratio.depends_on(t)) {
    Canonical E = make_exp(ratio * tc);
    Canonical A = dF / (ratio * E);
    Canonical B = F - A * E;
    if (!A.depends_on(t) && !B.depends_on(t)) {
      t_of_psi = make_log((P - B) / A) / ratio;
      rec.family = "exp";
    }
  }
  if (!t_of_psi) {
    Canonical A = tc * dF;
    if (!A.depends_on(t)) {
      Canonical B = F - A * make_log(tc);
      if (!B.depends_on(t)) {
        t_of_psi = make_exp((P - B) / A);
        rec.family = "ln";
      }
    }
  }
  if (!t_of_psi) {
    Canonical m = tc * ddF / dF + Canonical(1);
    if (!m.is_zero() && !m.depends_on(t)) {
      Canonical tm = make_exp(m * make_log(tc));
      Canonical A = F / tm;
      Canonical B = F - A * tm;
      if (!A.depends_on(t) && B.is_zero()) {
        t_of_psi = make_exp(make_log(P / A) / m);
        rec.family = "power";
      } else {
        A = dF / (m * make_exp((m - Canonical(1)) * make_log(tc)));
        B = F - A * tm;
        if (!A.depends_on(t) && !B.depends_on(t)) {
          t_of_psi = make_exp(make_log((P - B) / A) / m);
          rec.family = "power";
        }
      }
    }
  }
  if (!t_of_psi) {
    rec.family = "series";
    rec.series_order = opt.series_order;
    series_potential(rec, h, opt);
    finish();
    return;
  }
  Canonical v = C(substitute(rec.V_t, T(), t_of_psi->to_expr()));
  rec.V_psi = v.to_expr();
  rec.DV_psi = v.derivative(symbol_kernel("psi")).to_expr();
  finish();
}

Reconstruction reconstruct(const ExpansionHistory& h, const ReverseOptions& opt) {
  Reconstruction rec;
  std::tie(rec.V_t, rec.dotphi2) = reconstruct_potential(h, opt);
  check_kinetic(rec.dotphi2, h, opt);
  integrate_field(rec, h, opt);
  potential_of_field(rec, h, opt);

  Expr kg = insert_history(geometric_system().get("EcuKG"), h);
  kg = substitute(kg, CosmoModel::phi(), rec.phi_t);
  rec.kg_residual = simplify(kg);
  auto sol = solve_linear({rec.kg_residual}, {CosmoModel::DV()});
  rec.DV_t = sol.at(CosmoModel::DV());
  return rec;
}

// ---------------------------------------------------------------------------

bool ConsistencyReport::all_ok() const {
  for (const auto& r : residuals)
    if (!r.ok) return false;
  return dv_consistent;
}

namespace {

/// max |e| over 21 points of |t - t0| <= 0.1; points outside the domain are skipped.
double grid_max(const Expr& e, const ExpansionHistory& h, const ReverseOptions& opt) {
  Bindings b = numeric_bindings(e, opt);
  double worst = 0;
  int ok = 0;
  for (int i = -10; i <= 10; ++i) {
    b.symbols["t"] = h.t0.get_d() + 0.01 * i;
    try {
      worst = std::max(worst, std::fabs(eval(e, b)));
      ++ok;
    } catch (const DomainError&) {
    }
  }
  if (ok == 0) throw UndecidableError("residual could not be evaluated on the grid");
  return worst;
}

}  // namespace

ConsistencyReport verify_consistency(const Reconstruction& rec, const ExpansionHistory& h, const ReverseOptions& opt) {
  ConsistencyReport report;
  const double grid_tol = 1e-6;
  Expr dv_of_t = substitute(rec.DV_phi, sym("phi"), rec.phi_t);
  bool static_history = C(h.hubble_expr()).is_zero();
  for (const auto& eq : geometric_system().equations) {
    ResidualCheck check;
    check.name = eq.name;
    if (eq.name == "Ecunr22" && static_history) {
      check.ok = true;
      check.method = "skipped";
      report.residuals.push_back(check);
      continue;
    }
    Expr e = insert_history(eq.residual, h);
    e = substitute(e, CosmoModel::V(), rec.V_t);
    e = substitute(e, CosmoModel::phi(), rec.phi_t);
    e = substitute(e, CosmoModel::DV(), dv_of_t);
    if (rec.closed_form) {
      ZeroTest z = zero_test(e);
      check.ok = z.zero;
      check.method = z.path == ZeroPath::Canonical ? "canonical" : "sampling";
    } else {
      check.max_abs = grid_max(e, h, opt);
      check.ok = check.max_abs < grid_tol;
      check.method = "grid";
    }
    report.residuals.push_back(check);
  }
  Expr dv_diff = rec.DV_t - dv_of_t;
  if (rec.closed_form) {
    ZeroTest z = zero_test(dv_diff);
    report.dv_consistent = z.zero;
    report.dv_method = z.path == ZeroPath::Canonical ? "canonical" : "sampling";
  } else {
    report.dv_consistent = grid_max(dv_diff, h, opt) < grid_tol;
    report.dv_method = "grid";
  }
  return report;
}

}  // namespace cosmo
