#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nare/bench.hpp"
#include "nare/classify.hpp"
#include "nare/error.hpp"
#include "nare/generators.hpp"
#include "nare/methods.hpp"
#include "nare/problem_io.hpp"

namespace py = pybind11;
using namespace nare;

namespace {

py::dict diagnostics_dict(const ParamDiagnostics& d) {
  py::dict out;
  auto put = [&](const char* key, const std::optional<double>& v) {
    out[key] = v ? py::cast(*v) : py::none();
  };
  put("psi1", d.psi1);
  put("psi2", d.psi2);
  put("psi1_tilde", d.psi1_tilde);
  put("psi2_tilde", d.psi2_tilde);
  put("vartheta", d.vartheta);
  put("c_star", d.c_star);
  put("t_star", d.t_star);
  put("gamma_star", d.gamma_star);
  put("tau_star", d.tau_star);
  return out;
}

MethodRun solve(const NareProblem& p, const std::string& method, double tol,
                std::optional<int> max_iter, double zeta, double sor_omega, double aor_gamma) {
  p.validate();
  MethodOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.zeta = zeta;
  opts.sor_omega = sor_omega;
  opts.aor_gamma = aor_gamma;
  const Method m = parse_method(method);
  py::gil_scoped_release release;
  return run_method(p, m, opts);
}

}  // namespace

PYBIND11_MODULE(_nare, m) {
  m.doc() = "Complex nonsymmetric algebraic Riccati equation solvers";

  auto base = py::register_exception<Error>(m, "NareError", PyExc_RuntimeError);
  py::register_exception<SingularMatrix>(m, "SingularMatrix", base.ptr());
  py::register_exception<SylvesterSingular>(m, "SylvesterSingular", base.ptr());
  py::register_exception<NoConvergence>(m, "NoConvergence", base.ptr());
  py::register_exception<MarginViolation>(m, "MarginViolation", base.ptr());
  py::register_exception<Infeasible>(m, "Infeasible", base.ptr());
  py::register_exception<RotationInfeasible>(m, "RotationInfeasible", base.ptr());
  py::register_exception<BracketInvalid>(m, "BracketInvalid", base.ptr());
  py::register_exception<BadParam>(m, "BadParam", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<NareProblem>(m, "Problem")
      .def(py::init([](CMatrix a, CMatrix b, CMatrix c, CMatrix d, double omega) {
             NareProblem p{std::move(a), std::move(b), std::move(c), std::move(d), omega};
             p.validate();
             return p;
           }),
           py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"), py::arg("omega") = 1.0)
      .def_readwrite("A", &NareProblem::A)
      .def_readwrite("B", &NareProblem::B)
      .def_readwrite("C", &NareProblem::C)
      .def_readwrite("D", &NareProblem::D)
      .def_readwrite("omega", &NareProblem::omega)
      .def_property_readonly("m", &NareProblem::m)
      .def_property_readonly("n", &NareProblem::n)
      .def("validate", &NareProblem::validate)
      .def("rotated", &NareProblem::rotated, py::arg("chi"))
      .def("to_json", [](const NareProblem& p) { return problem_to_json(p); })
      .def_static("from_json", &problem_from_json, py::arg("text"))
      .def("__repr__", [](const NareProblem& p) {
        return "<Problem m=" + std::to_string(p.m()) + " n=" + std::to_string(p.n()) +
               " omega=" + std::to_string(p.omega) + ">";
      });

  py::class_<ClassReport>(m, "ClassReport")
      .def_readonly("is_z_pattern_Qomega", &ClassReport::is_z_pattern_Qomega)
      .def_readonly("qomega_is_nonsingular_M", &ClassReport::qomega_is_nonsingular_M)
      .def_readonly("qomega_times_one_positive", &ClassReport::qomega_times_one_positive)
      .def_readonly("margins", &ClassReport::margins)
      .def_property_readonly("verdict", [](const ClassReport& r) { return verdict_name(r.verdict); });

  py::class_<ParamChoice>(m, "ParamChoice")
      .def_readonly("alpha", &ParamChoice::alpha)
      .def_readonly("beta", &ParamChoice::beta)
      .def_readonly("t", &ParamChoice::t)
      .def_readonly("gamma", &ParamChoice::gamma)
      .def_readonly("chi", &ParamChoice::chi)
      .def_readonly("note", &ParamChoice::note)
      .def_property_readonly("strategy", [](const ParamChoice& p) { return strategy_name(p.strategy); })
      .def_property_readonly("diagnostics", [](const ParamChoice& p) { return diagnostics_dict(p.diagnostics); });

  py::class_<MethodRun>(m, "Solution")
      .def_property_readonly("phi", [](const MethodRun& r) { return r.result.phi; })
      .def_property_readonly("psi", [](const MethodRun& r) { return r.psi; })
      .def_property_readonly("iterations", [](const MethodRun& r) { return r.result.iterations; })
      .def_property_readonly("nres_history", [](const MethodRun& r) { return r.result.nres_history; })
      .def_property_readonly("nres", [](const MethodRun& r) { return r.result.final_nres(); })
      .def_property_readonly("converged", [](const MethodRun& r) { return r.result.converged; })
      .def_property_readonly("stop_reason",
                             [](const MethodRun& r) { return stop_reason_name(r.result.stop_reason); })
      .def_property_readonly("warnings", [](const MethodRun& r) { return r.result.warnings; })
      .def_property_readonly("failure", [](const MethodRun& r) { return r.result.failure; })
      .def_property_readonly("params", [](const MethodRun& r) { return r.params; })
      .def_readonly("seconds", &MethodRun::seconds);

  m.def("methods", [] {
    std::vector<std::string> out;
    for (Method x : all_methods()) out.emplace_back(method_name(x));
    return out;
  });
  m.def("classify", &classify, py::arg("problem"));
  m.def("solve", &solve, py::arg("problem"), py::arg("method") = "pSDAn",
        py::arg("tol") = kDefaultTol, py::arg("max_iter") = py::none(), py::arg("zeta") = kDefaultZeta,
        py::arg("sor_omega") = 1.0, py::arg("aor_gamma") = 1.0);
  m.def(
      "choose_params",
      [](const NareProblem& p, const std::string& method, double zeta) {
        const Method x = parse_method(method);
        if (!is_doubling(x)) throw BadParam(method + " is not a doubling method");
        return choose_params(p, x, zeta);
      },
      py::arg("problem"), py::arg("method"), py::arg("zeta") = kDefaultZeta);
  m.def("nres", &nres, py::arg("problem"), py::arg("phi"));
  m.def(
      "verify_extremal",
      [](const NareProblem& p, const CMatrix& phi) {
        const ExtremalReport r = verify_extremal(p, phi);
        py::dict out;
        out["nres"] = r.nres;
        out["eigenvalues"] = r.eigenvalues;
        out["all_in_upper_right"] = r.all_in_upper_right;
        return out;
      },
      py::arg("problem"), py::arg("phi"));

  m.def("example_71", &gen_example_71, py::arg("n"), py::arg("xi"), py::arg("eta"), py::arg("u"),
        py::arg("omega"));
  m.def("example_72", &gen_example_72, py::arg("n"), py::arg("eta"), py::arg("omega"));
  m.def("random_problem", &gen_random_homega, py::arg("n"), py::arg("m"), py::arg("omega"),
        py::arg("margin") = 0.25, py::arg("seed") = 0);
  m.def("read_problem", &read_problem, py::arg("path"));
  m.def("write_problem", &write_problem, py::arg("path"), py::arg("problem"));

  m.def(
      "bench",
      [](const std::string& preset, const std::string& example, Index n, int jobs) {
        const auto cases = bench_preset(preset, example, n);
        std::vector<BenchRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_bench(cases, {}, jobs);
        }
        return bench_csv(rows);
      },
      py::arg("preset") = "acceptance", py::arg("example") = "", py::arg("n") = 16, py::arg("jobs") = 1,
      "Runs a preset grid and returns the CSV text.");
}
