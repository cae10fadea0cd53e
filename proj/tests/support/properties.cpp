#include "support/properties.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <map>

#include "cosmo/calculus.hpp"
#include "cosmo/canonical.hpp"
#include "cosmo/evaluate.hpp"
#include "cosmo/parser.hpp"
#include "cosmo/reverse.hpp"
#include "cosmo/session.hpp"
#include "cosmo/solve.hpp"

namespace cosmo::testing {

Rational ExprGenerator::small_rational(int max_num, int max_den) {
  int n = 0;
  while (n == 0) n = integer(-max_num, max_num);
  Rational q(n, integer(1, max_den));
  q.canonicalize();
  return q;
}

Expr ExprGenerator::leaf() {
  switch (integer(0, 4)) {
    case 0: return sym("t");
    case 1: return sym("x");
    case 2: return sym("y");
    case 3: return Expr(integer(1, 4));
    default: return Expr(small_rational());
  }
}

Expr ExprGenerator::positive(int depth) {
  if (depth <= 0) {
    switch (integer(0, 2)) {
      case 0: return sym("t");
      case 1: return sym("x") + Expr(integer(1, 3));
      default: return Expr(Rational(integer(1, 5), integer(1, 3)));
    }
  }
  switch (integer(0, 4)) {
    case 0: return Expr(1) + pow(any(depth - 1), 2);
    case 1: return Expr::exp(Expr(small_rational(2, 3)) * leaf());
    case 2: return Expr(2) + Expr::cos(any(depth - 1));
    case 3: return positive(depth - 1) * positive(depth - 1);
    default: return positive(depth - 1) + positive(depth - 1);
  }
}

Expr ExprGenerator::any(int depth) {
  if (depth <= 0) return leaf();
  switch (integer(0, 9)) {
    case 0:
    case 1: return any(depth - 1) + any(depth - 1);
    case 2: return any(depth - 1) - any(depth - 1);
    case 3: return any(depth - 1) * any(depth - 1);
    case 4: return any(depth - 1) / positive(depth - 1);
    case 5: return pow(any(depth - 1), integer(2, 3));
    case 6: return Expr::exp(Expr(small_rational(2, 3)) * (integer(0, 1) ? leaf() : Expr::sin(any(depth - 1))));
    case 7: return integer(0, 1) ? Expr::sin(any(depth - 1)) : Expr::cos(any(depth - 1));
    case 8: return Expr::sqrt(positive(depth - 1));
    default: return Expr::log(positive(depth - 1));
  }
}

Expr ExprGenerator::integrable() {
  const Expr t = sym("t");
  std::vector<Expr> terms;
  const int n = integer(1, 4);
  for (int i = 0; i < n; ++i) {
    Expr c = small_rational();
    if (integer(0, 2) == 0) c = c * sym("k");
    if (integer(0, 1)) {
      terms.push_back(c * pow(t, integer(-3, 4)));
    } else {
      Expr rate = small_rational(3, 3);
      if (integer(0, 2) == 0) rate = rate * sym("w");
      terms.push_back(c * Expr::exp(rate * t));
    }
  }
  return Expr::sum(std::move(terms));
}

namespace {

void record(PropertyResult& r, bool ok, const std::function<std::string()>& describe) {
  ++r.cases;
  if (ok) return;
  if (r.failures++ == 0) r.first_failure = describe();
}

void record_exception(PropertyResult& r, const std::string& input, const std::exception& ex) {
  ++r.cases;
  if (r.failures++ == 0) r.first_failure = input + ": " + ex.what();
}

}  // namespace

PropertyResult property_simplify_idempotent(int cases, std::uint64_t seed) {
  PropertyResult r;
  r.name = "simplify idempotence";
  ExprGenerator gen(seed);
  for (int i = 0; i < cases; ++i) {
    const Expr e = gen.any(gen.integer(1, 3));
    try {
      const Expr s = simplify(e);
      const Expr s2 = simplify(s);
      record(r, s == s2, [&] { return e.str() + " -> " + s.str() + " -> " + s2.str(); });
    } catch (const std::exception& ex) {
      record_exception(r, e.str(), ex);
    }
  }
  return r;
}

PropertyResult property_parse_print_round_trip(int cases, std::uint64_t seed) {
  PropertyResult r;
  r.name = "parse/print round trip";
  ExprGenerator gen(seed + 1);
  for (int i = 0; i < cases; ++i) {
    const Expr e = gen.any(gen.integer(1, 3));
    try {
      const Canonical want = Canonical::of(e);
      const Canonical raw = Canonical::of(parse(e.str()));
      const Canonical canon = Canonical::of(parse(simplify(e).str()));
      record(r, raw == want && canon == want, [&] { return e.str() + " reparsed as " + raw.str(); });
    } catch (const std::exception& ex) {
      record_exception(r, e.str(), ex);
    }
  }
  return r;
}

PropertyResult property_antiderivative_inverse(int cases, std::uint64_t seed) {
  PropertyResult r;
  r.name = "antiderivative inverse";
  ExprGenerator gen(seed + 2);
  const Expr t = sym("t");
  for (int i = 0; i < cases; ++i) {
    const Expr e = gen.integrable();
    try {
      auto F = antiderivative(e, t);
      record(r, F && is_zero(diff(*F, t) - e),
             [&] { return e.str() + " -> " + (F ? F->str() : std::string("no closed form")); });
    } catch (const std::exception& ex) {
      record_exception(r, e.str(), ex);
    }
  }
  return r;
}

namespace {

ExpansionHistory random_history(ExprGenerator& gen, std::string& label) {
  const Expr t = sym("t");
  switch (gen.integer(0, 3)) {
    case 0: {
      Rational w(gen.integer(1, 6), gen.integer(1, 2));
      w.canonicalize();
      Expr k = gen.integer(1, 4);
      label = "R = exp(" + to_string(w) + " t), k = " + k.str();
      return ExpansionHistory::from_scale_factor(Expr::exp(Expr(w) * t), k);
    }
    case 1: {
      Expr R0 = gen.integer(0, 1) ? sym("R0") : Expr(gen.integer(1, 3));
      label = "R = " + R0.str() + " exp(w t), k symbolic";
      return ExpansionHistory::from_scale_factor(R0 * Expr::exp(sym("w") * t), sym("k"));
    }
    case 2: {
      Rational p(gen.integer(1, 8), gen.integer(1, 3));
      p.canonicalize();
      label = "R = t^" + to_string(p) + ", k = 0";
      return ExpansionHistory::from_scale_factor(pow(t, p), Expr(0), 1);
    }
    default: {
      Rational w(gen.integer(1, 4), gen.integer(1, 3));
      w.canonicalize();
      Expr k = gen.integer(1, 3);
      label = "H = " + to_string(w) + ", k = " + k.str();
      return ExpansionHistory::from_hubble(Expr(w), k);
    }
  }
}

}  // namespace

PropertyResult property_reverse_invariances(int cases, std::uint64_t seed) {
  PropertyResult r;
  r.name = "reverse branch/phi0 invariance";
  ExprGenerator gen(seed + 3);
  const Expr phi = sym("phi");
  const Expr psi = sym("psi");
  for (int i = 0; i < cases; ++i) {
    std::string label;
    const ExpansionHistory h = random_history(gen, label);
    const Expr delta = gen.small_rational();
    try {
      ReverseOptions plus, minus;
      minus.branch = -1;
      const Reconstruction a = reconstruct(h, plus);
      const Reconstruction b = reconstruct(h, minus);
      const Expr shift_a = a.phi_t - a.phi0;
      const Expr shift_b = b.phi_t - b.phi0;
      bool ok = is_zero(shift_a + shift_b);
      ok = ok && is_zero(substitute(b.V_psi, psi, -psi) - a.V_psi);
      ok = ok && is_zero(substitute(a.V_phi, phi, a.phi_t) - a.V_t);
      ok = ok && is_zero(substitute(b.V_phi, phi, b.phi_t) - b.V_t);
      // phi0 -> phi0 + delta moves phi(t) by delta and leaves V(phi(t)) alone.
      const Expr moved = sym("phi0") + delta;
      const Expr phi_moved = substitute(a.phi_t, a.phi0, moved);
      const Expr V_moved = substitute(a.V_phi, a.phi0, moved);
      ok = ok && is_zero(phi_moved - a.phi_t - delta);
      ok = ok && is_zero(substitute(V_moved, phi, phi_moved) - a.V_t);
      record(r, ok, [&] { return label + " (delta " + delta.str() + ")"; });
    } catch (const std::exception& ex) {
      record_exception(r, label, ex);
    }
  }
  return r;
}

PropertyResult property_session_round_trip(int cases, std::uint64_t seed) {
  PropertyResult r;
  r.name = "session round trip";
  ExprGenerator gen(seed + 4);
  for (int i = 0; i < cases; ++i) {
    SessionArchive s;
    s.settings["units"] = gen.integer(0, 1) ? "geometric" : "symbolic";
    s.settings["case"] = std::to_string(i);
    const int n = gen.integer(1, 4);
    for (int j = 0; j < n; ++j) s.expressions["e" + std::to_string(j)] = gen.any(gen.integer(0, 3));
    Tensor tensor("T", gen.integer(0, 1) ? std::vector<Valence>{Valence::Down, Valence::Down}
                                         : std::vector<Valence>{Valence::Up});
    for (std::size_t f = 0; f < tensor.components().size(); ++f)
      if (gen.integer(0, 3) == 0) tensor.flat(f) = Canonical::of(gen.any(1));
    s.tensors["T"] = tensor;
    try {
      const SessionArchive back = session_from_string(session_to_string(s));
      bool ok = back.settings == s.settings && back.expressions.size() == s.expressions.size();
      for (const auto& [name, e] : s.expressions) {
        auto it = back.expressions.find(name);
        ok = ok && it != back.expressions.end() && it->second == simplify(e) && equivalent(it->second, e);
      }
      auto it = back.tensors.find("T");
      ok = ok && it != back.tensors.end() && it->second.valence() == tensor.valence() &&
           it->second.components() == tensor.components();
      record(r, ok, [&] { return "archive " + std::to_string(i); });
    } catch (const std::exception& ex) {
      record_exception(r, "archive " + std::to_string(i), ex);
    }
  }
  return r;
}

PropertyResult property_diff_eval_consistency(int cases, std::uint64_t seed) {
  PropertyResult r;
  r.name = "diff/eval consistency";
  ExprGenerator gen(seed + 5);
  const Expr t = sym("t");
  for (int i = 0; i < cases; ++i) {
    const Expr e = gen.any(gen.integer(1, 3));
    try {
      const Expr de = diff(e, t);
      Bindings b;
      b.symbols = {{"x", 0.7}, {"y", 1.3}};
      bool ok = true;
      double worst = 0;
      for (int j = 0; j < 10; ++j) {
        b.symbols["t"] = gen.uniform(0.2, 1.8);
        const double sym_value = eval(de, b);
        const double fd = fd_derivative(
            [&](double s) {
              Bindings c = b;
              c.symbols["t"] = s;
              return eval(e, c);
            },
            b.symbols["t"]);
        const double err = std::fabs(sym_value - fd) / std::max(1.0, std::fabs(fd));
        worst = std::max(worst, err);
        ok = ok && err <= 1e-6;
      }
      record(r, ok, [&] { return e.str() + " rel err " + std::to_string(worst); });
    } catch (const std::exception& ex) {
      record_exception(r, e.str(), ex);
    }
  }
  return r;
}

PropertyResult property_solve_back_substitution(int cases, std::uint64_t seed) {
  PropertyResult r;
  r.name = "solve_linear back-substitution";
  ExprGenerator gen(seed + 6);
  const Expr t = sym("t");
  const std::vector<Expr> all_unknowns{fn("V", t), fn("D2Phi", t), fn("X", t)};
  for (int i = 0; i < cases; ++i) {
    const int n = gen.integer(1, 3);
    // A = L U with unit diagonals, so det A = 1 whatever the symbolic entries.
    std::vector<std::vector<Expr>> L(n, std::vector<Expr>(n)), U(n, std::vector<Expr>(n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        auto entry = [&] {
          Expr c = gen.integer(-3, 3);
          return gen.integer(0, 3) == 0 ? c * sym("k") : c;
        };
        L[a][b] = a == b ? Expr(1) : (a > b ? entry() : Expr(0));
        U[a][b] = a == b ? Expr(1) : (a < b ? entry() : Expr(0));
      }
    std::vector<Expr> unknowns(all_unknowns.begin(), all_unknowns.begin() + n);
    std::vector<Expr> eqs;
    for (int a = 0; a < n; ++a) {
      std::vector<Expr> terms;
      for (int b = 0; b < n; ++b) {
        Expr Aab = 0;
        for (int m = 0; m < n; ++m) Aab = Aab + L[a][m] * U[m][b];
        terms.push_back(Aab * unknowns[static_cast<std::size_t>(b)]);
      }
      terms.push_back(-gen.any(1));
      eqs.push_back(Expr::sum(std::move(terms)));
    }
    try {
      const auto sol = solve_linear(eqs, unknowns);
      bool ok = sol.size() == unknowns.size();
      for (const Expr& eq : eqs) {
        Expr back = eq;
        for (const auto& [u, v] : sol) back = substitute(back, u, v);
        ok = ok && is_zero(back);
      }
      record(r, ok, [&] { return "system of size " + std::to_string(n) + " starting " + eqs.front().str(); });
    } catch (const std::exception& ex) {
      record_exception(r, eqs.front().str(), ex);
    }
  }
  return r;
}

}  // namespace cosmo::testing
