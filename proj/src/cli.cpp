#include "cosmo/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cosmo/calculus.hpp"
#include "cosmo/errors.hpp"
#include "cosmo/evaluate.hpp"
#include "cosmo/model.hpp"
#include "cosmo/numeric.hpp"
#include "cosmo/parser.hpp"
#include "cosmo/reverse.hpp"
#include "cosmo/serialize.hpp"
#include "cosmo/session.hpp"
#include "cosmo/tensor.hpp"

namespace cosmo {

using nlohmann::json;

namespace {

constexpr unsigned long long kSeed = 0xC0540;

struct NamedExpr {
  std::string name;
  Expr value;
  std::string note;
};

/// Collects named results and renders them in one of the three output modes.
class Document {
 public:
  Document(std::string command, std::string mode) : command_(std::move(command)), mode_(std::move(mode)) {}

  void meta(const std::string& key, const json& v) { meta_[key] = v; }
  void add(const std::string& name, const Expr& e, const std::string& note = "") { items_.push_back({name, e, note}); }
  void line(const std::string& text) { lines_.push_back(text); }
  json& report() { return report_; }

  void render(std::ostream& out) const {
    if (mode_ == "machine") {
      json doc;
      doc["command"] = command_;
      doc["metadata"] = meta_;
      doc["metadata"]["seed"] = kSeed;
      doc["expressions"] = json::array();
      for (const auto& it : items_) {
        json j = {{"name", it.name}, {"text", it.value.str()}, {"tree", to_json(it.value)}, {"latex", it.value.latex()}};
        if (!it.note.empty()) j["note"] = it.note;
        doc["expressions"].push_back(j);
      }
      if (!report_.is_null()) doc["report"] = report_;
      out << doc.dump(2) << "\n";
      return;
    }
    std::size_t width = 0;
    for (const auto& it : items_) width = std::max(width, it.name.size());
    if (mode_ == "latex") {
      out << "\\begin{align}\n";
      for (std::size_t i = 0; i < items_.size(); ++i)
        out << "  \\mathrm{" << items_[i].name << "} &= " << items_[i].value.latex()
            << (i + 1 < items_.size() ? " \\\\\n" : "\n");
      out << "\\end{align}\n";
    } else {
      for (auto it = meta_.begin(); it != meta_.end(); ++it)
        out << it.key() << ": " << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump()) << "\n";
      for (const auto& it : items_)
        out << std::left << std::setw(static_cast<int>(width)) << it.name << " = " << it.value.str() << "\n";
    }
    for (const auto& l : lines_) out << (mode_ == "latex" ? "% " : "") << l << "\n";
  }

 private:
  std::string command_;
  std::string mode_;
  json meta_ = json::object();
  std::vector<NamedExpr> items_;
  std::vector<std::string> lines_;
  json report_;
};

Rational parse_rational(const std::string& text, const std::string& what) {
  auto q = Canonical::of(parse(text)).constant_value();
  if (!q) throw UnsupportedError(what + " must be a rational number, got '" + text + "'");
  return *q;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--param", "expected name=value, got " + item);
    Bindings none;
    out[item.substr(0, eq)] = eval(parse(item.substr(eq + 1)), none);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct DeriveArgs {
  std::string units = "symbolic", lambda = "off", fluid = "on", out = "text", save, load;
};

int cmd_derive(const DeriveArgs& a, std::ostream& out) {
  Document doc("derive", a.out);
  if (!a.load.empty()) {
    SessionArchive s = load_session(a.load);
    for (const auto& [k, v] : s.settings) doc.meta(k, v);
    for (const char* name : {"EcuKG", "Ecunr1", "Ecunr2", "Ecunr22", "Ecunr3"})
      if (s.expressions.count(name)) doc.add(name, s.expressions.at(name));
    doc.render(out);
    return kExitOk;
  }
  ModelSettings st;
  st.units = a.units == "geometric" ? Units::Geometric : Units::Symbolic;
  st.lambda = a.lambda == "on";
  st.fluid = a.fluid == "on";
  CosmoModel m(st);
  FriedmannSystem sys = reduce_to_friedmann(m);
  doc.meta("units", a.units);
  doc.meta("lambda", a.lambda);
  doc.meta("fluid", a.fluid);
  for (const auto& e : sys.equations) doc.add(e.name, e.residual, e.source);
  if (!a.save.empty()) {
    save_session(make_session(m, sys), a.save);
    doc.line("session written to " + a.save);
  }
  doc.render(out);
  return kExitOk;
}

struct ReverseArgs {
  std::string scale_factor, hubble, k = "k", branch = "+", t0 = "0", out = "text";
  int series_order = 4;
  std::vector<std::string> params;
};

int cmd_reverse(const ReverseArgs& a, std::ostream& out) {
  Expr k = parse(a.k);
  Rational t0 = parse_rational(a.t0, "--t0");
  ExpansionHistory h = a.scale_factor.empty() ? ExpansionHistory::from_hubble(parse(a.hubble), k, t0)
                                              : ExpansionHistory::from_scale_factor(parse(a.scale_factor), k, t0);
  ReverseOptions opt;
  opt.branch = a.branch == "-" ? -1 : 1;
  opt.series_order = a.series_order;
  opt.parameters = parse_params(a.params);
  Reconstruction rec = reconstruct(h, opt);
  ConsistencyReport rep = verify_consistency(rec, h, opt);

  Document doc("reverse", a.out);
  doc.meta("units", "geometric");
  doc.meta("history", a.scale_factor.empty() ? "H(t) = " + a.hubble : "R(t) = " + a.scale_factor);
  doc.meta("k", k.str());
  doc.meta("t0", to_string(t0));
  doc.meta("branch", a.branch);
  doc.meta("mode", rec.closed_form ? "closed-form" : "series, order " + std::to_string(rec.series_order));
  doc.meta("family", rec.family);
  doc.add("V(t)", rec.V_t);
  doc.add("dotphi^2", rec.dotphi2);
  doc.add("phi(t)", rec.phi_t);
  doc.add("V(phi)", rec.V_phi);
  doc.add("DV(phi)", rec.DV_phi);
  doc.add("V(psi)", rec.V_psi, "psi = phi - phi0");
  doc.add("EcuKG", rec.kg_residual, "Klein-Gordon residual with the history inserted");
  doc.add("DV(t)", rec.DV_t, "solved from EcuKG");
  json r = json::object();
  for (const auto& c : rep.residuals) {
    r[c.name] = {{"ok", c.ok}, {"method", c.method}, {"max_abs", c.max_abs}};
    std::ostringstream os;
    os << "check " << c.name << ": " << (c.ok ? "ok" : "FAILED") << " (" << c.method;
    if (c.method == "grid") os << ", max |residual| " << c.max_abs;
    os << ")";
    doc.line(os.str());
  }
  r["DV"] = {{"ok", rep.dv_consistent}, {"method", rep.dv_method}};
  r["all_ok"] = rep.all_ok();
  doc.line(std::string("check DV(phi(t)) = DV(t): ") + (rep.dv_consistent ? "ok" : "FAILED") + " (" + rep.dv_method + ")");
  doc.report() = r;
  doc.render(out);
  return rep.all_ok() ? kExitOk : kExitVerify;
}

struct CheckArgs {
  std::string metric = "frw", out = "text";
  bool flip = false;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
  CosmoModel m;
  if (a.metric == "minkowski") m.metric = Metric::minkowski(m.c);
  const Metric& g = m.metric;
  Tensor gamma = christoffel(g);
  Tensor ein;
  if (a.flip) {
    // Test hook: wrong sign of the trace term, G = Ric + R g / 2.
    Tensor ric = ricci_tensor(g, gamma);
    Canonical scalar = ricci_scalar(g, ric);
    ein = Tensor("G", {Valence::Down, Valence::Down});
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) ein.at({i, j}) = ric.at({i, j}) + g.g(i, j) * scalar * Canonical(Rational(1, 2));
  } else {
    ein = einstein_tensor(g);
  }
  struct Suite {
    std::string name;
    bool pass;
  };
  std::vector<Suite> suites;
  suites.push_back({"bianchi", covariant_divergence(ein, g, gamma, 0).is_zero()});
  suites.push_back({"stress-equivalence", (stress_energy_scalar_direct(m) - stress_energy_scalar_fluid(m)).is_zero()});
  Tensor eq = ein - stress_energy_total(m).scaled(Canonical::of(8 * sym("Pi") * m.G / pow(m.c, 4)));
  bool off = true;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      if (i != j && !eq.at({i, j}).is_zero()) off = false;
  suites.push_back({"off-diagonal", off});
  suites.push_back({"metric-compatibility", metric_covariant_derivative(g, gamma).is_zero()});

  bool all = true;
  json r = json::object();
  for (const auto& s : suites) {
    all = all && s.pass;
    r[s.name] = s.pass;
  }
  if (a.out == "machine") {
    json doc = {{"command", "check"}, {"metadata", {{"metric", a.metric}, {"seed", kSeed}}}, {"report", r}};
    out << doc.dump(2) << "\n";
  } else {
    out << "metric: " << a.metric << "\n";
    for (const auto& s : suites) out << (s.pass ? "PASS " : "FAIL ") << s.name << "\n";
  }
  return all ? kExitOk : kExitVerify;
}

struct EvolveArgs {
  std::string potential, dpotential, out;
  double phi0 = 0, dphi0 = 0, H0 = 0, a0 = 1, k = 0, t0 = 0, t_end = 1, dt = 1e-3, tol = 1e-6;
  bool solve_h0 = false;
  int stride = 1;
  std::vector<std::string> params;
};

int cmd_evolve(const EvolveArgs& a, std::ostream& out, std::ostream& err) {
  Expr V = parse(a.potential);
  Expr phi = sym("phi");
  Expr DV = a.dpotential.empty() ? simplify(diff(V, phi)) : parse(a.dpotential);
  Bindings base;
  base.symbols = parse_params(a.params);
  auto compile = [&](const Expr& e) -> ScalarFn {
    return [e, base](double x) {
      Bindings b = base;
      b.symbols["phi"] = x;
      return eval(e, b);
    };
  };
  IntegrationConfig cfg;
  cfg.h = a.dt;
  cfg.t_end = a.t_end;
  cfg.constraint_tol = a.tol;
  cfg.k = a.k;
  cfg.V = compile(V);
  cfg.DV = compile(DV);
  cfg.stride = a.stride;
  EvolutionState s{a.t0, a.a0, a.H0, a.phi0, a.dphi0};
  if (a.solve_h0) s.H = solve_H0(s, cfg);
  auto series = evolve(s, cfg);
  std::string csv = to_csv(series);
  // With the series on stdout the summary goes to stderr.
  std::ostream* summary = &out;
  if (a.out.empty()) {
    out << csv;
    summary = &err;
  } else {
    std::ofstream f(a.out);
    if (!f) throw CLI::ValidationError("--out", "cannot write " + a.out);
    f << csv;
  }
  const auto& last = series.back();
  *summary << std::setprecision(12) << "H0 = " << s.H << "\n"
           << "final t = " << last.state.t << ", a = " << last.state.a << "\n"
           << "final constraint residual = " << last.constraint_residual << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symbolic FRW cosmology: Friedmann system derivation and potential reconstruction"};
  app.require_subcommand(1);
  const std::vector<std::string> modes{"text", "machine", "latex"};

  DeriveArgs d;
  auto* derive = app.add_subcommand("derive", "derive the five Friedmann-system residuals");
  derive->add_option("--units", d.units)->check(CLI::IsMember({"geometric", "symbolic"}));
  derive->add_option("--lambda", d.lambda)->check(CLI::IsMember({"on", "off"}));
  derive->add_option("--fluid", d.fluid)->check(CLI::IsMember({"on", "off"}));
  derive->add_option("--out", d.out)->check(CLI::IsMember(modes));
  auto* save_opt = derive->add_option("--save", d.save, "write a session archive");
  auto* load_opt = derive->add_option("--load", d.load, "print the system stored in a session archive");
  save_opt->excludes(load_opt);

  ReverseArgs r;
  auto* reverse = app.add_subcommand("reverse", "reconstruct V(phi) from a prescribed expansion");
  auto* sf = reverse->add_option("--scale-factor", r.scale_factor);
  auto* hb = reverse->add_option("--hubble", r.hubble);
  sf->excludes(hb);
  reverse->add_option("--k", r.k);
  reverse->add_option("--branch", r.branch)->check(CLI::IsMember({"+", "-"}));
  reverse->add_option("--series-order", r.series_order)->check(CLI::Range(1, 12));
  reverse->add_option("--t0", r.t0);
  reverse->add_option("--param", r.params, "numeric parameter name=value for the checks");
  reverse->add_option("--out", r.out)->check(CLI::IsMember(modes));

  CheckArgs c;
  auto* check = app.add_subcommand("check", "run the tensor identity suites");
  check->add_option("--metric", c.metric)->check(CLI::IsMember({"frw", "minkowski"}));
  check->add_flag("--inject-sign-flip", c.flip, "test hook: use Ric + R g/2 as the Einstein tensor");
  check->add_option("--out", c.out)->check(CLI::IsMember(modes));

  EvolveArgs e;
  auto* evolve_cmd = app.add_subcommand("evolve", "integrate the Friedmann + Klein-Gordon system");
  evolve_cmd->add_option("--potential", e.potential, "V as an expression in phi")->required();
  evolve_cmd->add_option("--dpotential", e.dpotential, "dV/dphi (default: symbolic derivative)");
  evolve_cmd->add_option("--phi0", e.phi0);
  evolve_cmd->add_option("--dphi0", e.dphi0);
  auto* h0 = evolve_cmd->add_option("--H0", e.H0);
  auto* solve = evolve_cmd->add_flag("--solve-H0", e.solve_h0, "compute H0 from the constraint");
  h0->excludes(solve);
  evolve_cmd->add_option("--a0", e.a0)->check(CLI::PositiveNumber);
  evolve_cmd->add_option("--k", e.k);
  evolve_cmd->add_option("--t0", e.t0);
  evolve_cmd->add_option("--t-end", e.t_end);
  evolve_cmd->add_option("--dt", e.dt)->check(CLI::PositiveNumber);
  evolve_cmd->add_option("--tol", e.tol)->check(CLI::PositiveNumber);
  evolve_cmd->add_option("--stride", e.stride)->check(CLI::PositiveNumber);
  evolve_cmd->add_option("--param", e.params, "numeric parameter name=value");
  evolve_cmd->add_option("--out", e.out, "CSV path (default: stdout)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
    if (derive->parsed()) return cmd_derive(d, out);
    if (reverse->parsed()) {
      if (r.scale_factor.empty() == r.hubble.empty())
        throw CLI::ValidationError("reverse", "exactly one of --scale-factor and --hubble is required");
      return cmd_reverse(r, out);
    }
    if (check->parsed()) return cmd_check(c, out);
    if (evolve_cmd->parsed()) return cmd_evolve(e, out, err);
  } catch (const CLI::ParseError& ex) {
    std::ostringstream os, es;
    int code = app.exit(ex, os, es);
    out << os.str();
    err << es.str();
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const ParseError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const SessionError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const NegativeKineticError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitMath;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitMath;
  }
  return kExitUsage;
}

}  // namespace cosmo
