#include <hyperfree/bench.h>
#include <hyperfree/errors.h>
#include <hyperfree/material.h>
#include <hyperfree/verify.h>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace hyperfree;

namespace
{
template <typename F>
auto
by_dim(const Eigen::MatrixXd &A, F &&f)
{
  if (A.rows() == 2 && A.cols() == 2)
    return f(Tensor2<2>(A));
  if (A.rows() == 3 && A.cols() == 3)
    return f(Tensor2<3>(A));
  throw py::value_error("expected a 2x2 or 3x3 matrix");
}

py::dict
as_dict(const IterationRecord &r)
{
  py::dict d;
  d["step"]          = r.step;
  d["iteration"]     = r.iteration;
  d["load_fraction"] = r.load_fraction;
  d["residual_norm"] = r.residual_norm;
  d["update_norm"]   = r.update_norm;
  d["cg_iterations"] = r.cg_iterations;
  d["cg_seconds"]    = r.cg_seconds;
  d["setup_seconds"] = r.setup_seconds;
  return d;
}
} // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Matrix-free finite-strain elasticity benchmarks";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);
  py::register_exception<NonPositiveJacobian>(m, "NonPositiveJacobian", PyExc_ArithmeticError);
  py::register_exception<IndefiniteOperator>(m, "IndefiniteOperator", PyExc_ArithmeticError);

  py::enum_<Strategy>(m, "Strategy")
    .value("scalar", Strategy::scalar)
    .value("tensor2", Strategy::tensor2)
    .value("tensor4", Strategy::tensor4)
    .value("matrix_based", Strategy::matrix_based);

  py::enum_<PreconditionerType>(m, "Preconditioner")
    .value("gmg", PreconditionerType::gmg)
    .value("diag", PreconditionerType::diag)
    .value("none", PreconditionerType::none);

  py::class_<RunConfig>(m, "RunConfig")
    .def(py::init<>())
    .def_readwrite("dim", &RunConfig::dim)
    .def_readwrite("p", &RunConfig::p)
    .def_readwrite("q", &RunConfig::q)
    .def_readwrite("reduced_quadrature", &RunConfig::reduced_quadrature)
    .def_readwrite("refinements", &RunConfig::refinements)
    .def_readwrite("strategy", &RunConfig::strategy)
    .def_readwrite("preconditioner", &RunConfig::preconditioner)
    .def_readwrite("material", &RunConfig::material)
    .def_readwrite("load", &RunConfig::load)
    .def_readwrite("load_scale", &RunConfig::load_scale)
    .def_readwrite("load_steps", &RunConfig::load_steps)
    .def_readwrite("seed", &RunConfig::seed)
    .def_readwrite("timings", &RunConfig::timings)
    .def_property_readonly("n_q_points_1d", &RunConfig::n_q_points_1d)
    .def_property_readonly("n_cells", &RunConfig::n_cells)
    .def_property_readonly("n_dofs", &RunConfig::n_dofs)
    .def("validate", &RunConfig::validate)
    .def("update", [](RunConfig &c, const std::string &json_text) { apply_config_json(c, json_text); },
         py::arg("json_text"), "apply a JSON object of configuration keys")
    .def("__repr__", [](const RunConfig &c) {
      return "RunConfig(dim=" + std::to_string(c.dim) + ", p=" + std::to_string(c.p) +
             ", refinements=" + std::to_string(c.refinements) + ", strategy=" + std::string(to_string(c.strategy)) +
             ")";
    });

  m.def("preset", [](const std::string &name) { return preset(name); }, py::arg("name"));
  m.def("preset_names", &preset_names);
  m.def("load_config", &load_config, py::arg("path"));

  py::class_<MetricsRecord>(m, "MetricsRecord")
    .def_readonly("config", &MetricsRecord::config)
    .def_readonly("kind", &MetricsRecord::kind)
    .def_readonly("n_cells", &MetricsRecord::n_cells)
    .def_readonly("n_dofs", &MetricsRecord::n_dofs)
    .def_readonly("mv_seconds", &MetricsRecord::mv_seconds)
    .def_readonly("mv_seconds_per_dof", &MetricsRecord::mv_seconds_per_dof)
    .def_readonly("flops_per_apply", &MetricsRecord::flops_per_apply)
    .def_readonly("flops_per_dof", &MetricsRecord::flops_per_dof)
    .def_readonly("memory_bytes", &MetricsRecord::memory_bytes)
    .def_readonly("cg_iterations_mean", &MetricsRecord::cg_iterations_mean)
    .def_readonly("cg_iterations_total", &MetricsRecord::cg_iterations_total)
    .def_readonly("newton_iterations", &MetricsRecord::newton_iterations)
    .def_readonly("solver_seconds", &MetricsRecord::solver_seconds)
    .def_readonly("solver_seconds_per_dof", &MetricsRecord::solver_seconds_per_dof)
    .def_readonly("converged", &MetricsRecord::converged)
    .def("__eq__", [](const MetricsRecord &a, const MetricsRecord &b) { return a == b; });

  m.def("run_mv_benchmark", &run_mv_benchmark, py::arg("config"), py::call_guard<py::gil_scoped_release>());

  m.def(
    "run_solver_benchmark",
    [](const RunConfig &config) {
      SolverRun run;
      {
        py::gil_scoped_release release;
        run = run_solver_benchmark(config);
      }
      py::list log;
      for (const auto &r : run.result.log)
        log.append(as_dict(r));
      py::dict out;
      out["record"]     = run.record;
      out["u"]          = py::array_t<double>(run.result.u.size(), run.result.u.data());
      out["log"]        = log;
      out["bisections"] = run.result.bisections;
      out["newton_log_csv"] = newton_log_csv(run.result, config.timings);
      return out;
    },
    py::arg("config"), "incremental Newton solve; returns record, displacement u and the iteration log");

  m.def("results_csv", &results_csv, py::arg("records"));
  m.def("results_json", &results_json, py::arg("records"));
  m.def("parse_results_json", [](const std::string &text) { return parse_results_json(text); }, py::arg("text"));

  py::class_<CheckResult>(m, "CheckResult")
    .def_readonly("group", &CheckResult::group)
    .def_readonly("name", &CheckResult::name)
    .def_readonly("value", &CheckResult::value)
    .def_readonly("relation", &CheckResult::relation)
    .def_readonly("threshold", &CheckResult::threshold)
    .def_readonly("passed", &CheckResult::pass)
    .def("__repr__", [](const CheckResult &c) {
      return "CheckResult(" + std::to_string(c.group) + ", " + c.name + ", " + format_double(c.value) + ", " +
             (c.pass ? "pass" : "fail") + ")";
    });

  m.def("verification_groups", &verification_groups);
  m.def("group_title", &group_title, py::arg("group"));
  m.def("run_checks", &run_checks, py::arg("group"), py::call_guard<py::gil_scoped_release>());
  m.def("checks_csv", &checks_csv, py::arg("checks"));

  py::class_<NeoHookeanParams>(m, "NeoHookean")
    .def(py::init([](double mu, double lambda) { return NeoHookeanParams{mu, lambda}; }), py::arg("mu"),
         py::arg("lam"))
    .def_static("from_poisson", &NeoHookeanParams::from_poisson, py::arg("mu"), py::arg("nu"))
    .def_readwrite("mu", &NeoHookeanParams::mu)
    .def_readwrite("lam", &NeoHookeanParams::lambda)
    .def("scaled", &NeoHookeanParams::scaled, py::arg("factor"));

  m.def(
    "strain_energy",
    [](const Eigen::MatrixXd &C, const NeoHookeanParams &p) {
      return by_dim(C, [&](const auto &c) { return strain_energy(c, p); });
    },
    py::arg("C"), py::arg("params"));
  m.def(
    "second_pk_stress",
    [](const Eigen::MatrixXd &C, const NeoHookeanParams &p) {
      return by_dim(C, [&](const auto &c) { return Eigen::MatrixXd(second_pk_stress(c, p)); });
    },
    py::arg("C"), py::arg("params"));
  m.def(
    "kirchhoff_stress",
    [](const Eigen::MatrixXd &F, const NeoHookeanParams &p) {
      return by_dim(F, [&](const auto &f) {
        using T = std::decay_t<decltype(f)>;
        const T grad_u = f - T::Identity();
        return Eigen::MatrixXd(kirchhoff_stress(kinematics_from_displacement_gradient(grad_u), p));
      });
    },
    py::arg("F"), py::arg("params"), "tau = F S F^T for the deformation gradient F");
  m.def(
    "tangent_action",
    [](const Eigen::MatrixXd &g, const double J, const NeoHookeanParams &p) {
      return by_dim(g, [&](const auto &t) {
        return Eigen::MatrixXd(tangent_action_closed_form(symmetrize<std::decay_t<decltype(t)>::RowsAtCompileTime>(t), J, p));
      });
    },
    py::arg("grad_sym"), py::arg("J"), py::arg("params"), "spatial tangent J c : sym(g)");
}
