#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cosmo/calculus.hpp"
#include "cosmo/canonical.hpp"
#include "cosmo/errors.hpp"
#include "cosmo/evaluate.hpp"
#include "cosmo/model.hpp"
#include "cosmo/numeric.hpp"
#include "cosmo/parser.hpp"
#include "cosmo/reverse.hpp"

namespace py = pybind11;
using namespace cosmo;

namespace {

Rational rational_of(const std::string& text) {
  Rational q(text);
  q.canonicalize();
  return q;
}

py::dict reconstruction_dict(const Reconstruction& rec, const ConsistencyReport& rep) {
  py::dict d;
  d["V_t"] = rec.V_t;
  d["dotphi2"] = rec.dotphi2;
  d["phi_t"] = rec.phi_t;
  d["V_phi"] = rec.V_phi;
  d["DV_phi"] = rec.DV_phi;
  d["DV_t"] = rec.DV_t;
  d["family"] = rec.family;
  d["closed_form"] = rec.closed_form;
  d["series_order"] = rec.series_order;
  py::dict checks;
  for (const auto& r : rep.residuals) checks[py::str(r.name)] = py::make_tuple(r.ok, r.method, r.max_abs);
  d["checks"] = checks;
  d["dv_consistent"] = rep.dv_consistent;
  d["all_ok"] = rep.all_ok();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Symbolic FRW cosmology with a minimally coupled scalar field";

  auto base = py::register_exception<Error>(m, "CosmoError");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<NegativeKineticError>(m, "NegativeKineticError", base.ptr());
  py::register_exception<InversionError>(m, "InversionError", base.ptr());
  py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());

  py::class_<Expr>(m, "Expr")
      .def(py::init([](const std::string& text) { return parse(text); }))
      .def(py::init([](long n) { return Expr(Rational(n)); }))
      .def("__str__", &Expr::str)
      .def("__repr__", [](const Expr& e) { return "Expr('" + e.str() + "')"; })
      .def("latex", &Expr::latex)
      .def("__add__", [](const Expr& a, const Expr& b) { return a + b; })
      .def("__sub__", [](const Expr& a, const Expr& b) { return a - b; })
      .def("__mul__", [](const Expr& a, const Expr& b) { return a * b; })
      .def("__truediv__", [](const Expr& a, const Expr& b) { return a / b; })
      .def("__neg__", [](const Expr& a) { return -a; })
      .def("__pow__", [](const Expr& a, long n) { return pow(a, Rational(n)); });
  py::implicitly_convertible<py::str, Expr>();
  py::implicitly_convertible<py::int_, Expr>();

  m.def("parse", &parse, py::arg("text"));
  m.def("simplify", &simplify, py::arg("e"));
  m.def("diff", [](const Expr& e, const std::string& var, int order) { return diff(e, sym(var), order); },
        py::arg("e"), py::arg("var") = "t", py::arg("order") = 1);
  m.def("integrate", [](const Expr& e, const std::string& var) { return antiderivative(e, sym(var)); },
        py::arg("e"), py::arg("var") = "t", "Antiderivative, or None without a closed form.");
  m.def("is_zero", py::overload_cast<const Expr&>(&is_zero), py::arg("e"));
  m.def("equivalent", &equivalent, py::arg("a"), py::arg("b"));
  m.def(
      "eval",
      [](const Expr& e, const std::map<std::string, double>& symbols) {
        Bindings b;
        b.symbols = symbols;
        return eval(e, b);
      },
      py::arg("e"), py::arg("symbols") = std::map<std::string, double>{});

  m.def(
      "derive",
      [](bool geometric, bool lambda, bool fluid) {
        ModelSettings s;
        s.units = geometric ? Units::Geometric : Units::Symbolic;
        s.lambda = lambda;
        s.fluid = fluid;
        std::map<std::string, Expr> out;
        for (const auto& eq : reduce_to_friedmann(CosmoModel(s)).equations) out.emplace(eq.name, eq.residual);
        return out;
      },
      py::arg("geometric") = false, py::arg("lambda_") = false, py::arg("fluid") = true,
      "The five residuals EcuKG, Ecunr1, Ecunr2, Ecunr22, Ecunr3.");

  m.def(
      "reconstruct",
      [](std::optional<Expr> scale_factor, std::optional<Expr> hubble, const Expr& k, const std::string& t0,
         int branch, int order) {
        if (scale_factor.has_value() == hubble.has_value())
          throw py::value_error("give exactly one of scale_factor and hubble");
        const Rational t0q = rational_of(t0);
        ExpansionHistory h = scale_factor ? ExpansionHistory::from_scale_factor(*scale_factor, k, t0q)
                                          : ExpansionHistory::from_hubble(*hubble, k, t0q);
        ReverseOptions opt;
        opt.branch = branch;
        opt.series_order = order;
        Reconstruction rec = reconstruct(h, opt);
        return reconstruction_dict(rec, verify_consistency(rec, h, opt));
      },
      py::arg("scale_factor") = py::none(), py::arg("hubble") = py::none(), py::arg("k") = Expr(0),
      py::arg("t0") = "0", py::arg("branch") = 1, py::arg("order") = 4);

  m.def(
      "evolve",
      [](const Expr& V, std::optional<Expr> DV, const std::map<std::string, double>& params, double phi0,
         double dphi0, std::optional<double> H0, double a0, double k, double t0, double t_end, double dt,
         double tol, int stride) {
        const Expr dV = DV ? *DV : simplify(diff(V, sym("phi")));
        auto compile = [&params](const Expr& e) -> ScalarFn {
          return [e, params](double x) {
            Bindings b;
            b.symbols = params;
            b.symbols["phi"] = x;
            return eval(e, b);
          };
        };
        IntegrationConfig cfg;
        cfg.h = dt;
        cfg.t_end = t_end;
        cfg.constraint_tol = tol;
        cfg.k = k;
        cfg.V = compile(V);
        cfg.DV = compile(dV);
        cfg.stride = stride;
        EvolutionState s{t0, a0, H0.value_or(0), phi0, dphi0};
        if (!H0) s.H = solve_H0(s, cfg);
        std::map<std::string, std::vector<double>> cols;
        for (const auto& x : evolve(s, cfg)) {
          cols["t"].push_back(x.state.t);
          cols["a"].push_back(x.state.a);
          cols["H"].push_back(x.state.H);
          cols["phi"].push_back(x.state.phi);
          cols["dphi"].push_back(x.state.dphi);
          cols["constraint_residual"].push_back(x.constraint_residual);
        }
        return cols;
      },
      py::arg("V"), py::arg("DV") = py::none(), py::arg("params") = std::map<std::string, double>{},
      py::arg("phi0") = 0.0, py::arg("dphi0") = 0.0, py::arg("H0") = py::none(), py::arg("a0") = 1.0,
      py::arg("k") = 0.0, py::arg("t0") = 0.0, py::arg("t_end") = 1.0, py::arg("dt") = 1e-3,
      py::arg("tol") = 1e-6, py::arg("stride") = 1,
      "RK4 evolution; H0 is solved from the constraint when omitted. Returns columns by name.");
}
