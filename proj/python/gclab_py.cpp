#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gclab/carleman.hpp"
#include "gclab/errors.hpp"
#include "gclab/gaussian_means.hpp"
#include "gclab/identities.hpp"
#include "gclab/lab.hpp"
#include "gclab/propagators.hpp"
#include "gclab/version.hpp"

namespace py = pybind11;
using namespace gclab;

namespace {

py::array_t<cplx> samples(const WaveField& f) {
  py::array_t<cplx> out(static_cast<py::ssize_t>(f.size()));
  auto v = out.mutable_unchecked<1>();
  for (std::size_t j = 0; j < f.size(); ++j) v(static_cast<py::ssize_t>(j)) = f[j];
  return out;
}

WaveField field_from(const Grid1D& g, py::array_t<cplx, py::array::c_style | py::array::forcecast> a, double t) {
  if (a.ndim() != 1 || static_cast<std::size_t>(a.shape(0)) != g.size()) {
    throw PreconditionError("samples must be a 1-D array with one entry per grid node");
  }
  return WaveField(g, std::vector<cplx>(a.data(), a.data() + a.size()), t);
}

py::object as_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict check_dict(const lab::Check& c) {
  py::dict d;
  d["name"] = c.name;
  d["passed"] = c.passed;
  d["value"] = c.value;
  d["threshold"] = c.threshold;
  d["detail"] = c.detail;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = kVersion;

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<Grid1D>(m, "Grid1D")
      .def(py::init<std::size_t, double>(), py::arg("n_points"), py::arg("half_width"))
      .def_property_readonly("size", &Grid1D::size)
      .def_property_readonly("half_width", &Grid1D::half_width)
      .def_property_readonly("spacing", &Grid1D::spacing)
      .def("nodes", [](const Grid1D& g) { return py::array_t<double>(py::cast(g.nodes())); })
      .def("__repr__", [](const Grid1D& g) {
        return "Grid1D(" + std::to_string(g.size()) + ", " + std::to_string(g.half_width()) + ")";
      });

  py::class_<WaveField>(m, "WaveField")
      .def(py::init(&field_from), py::arg("grid"), py::arg("samples"), py::arg("time") = 0.0)
      .def_property_readonly("grid", &WaveField::grid)
      .def_property_readonly("time", &WaveField::time)
      .def_property_readonly("samples", &samples)
      .def("l2_norm", &WaveField::l2_norm)
      .def("spectral_tail_fraction", &WaveField::spectral_tail_fraction)
      .def("boundary_ratio", &WaveField::boundary_ratio)
      .def("is_resolved", &WaveField::is_resolved);

  m.def("free_propagate", &free_propagate, py::arg("field"), py::arg("t"));
  m.def("heat_regularize", &heat_regularize, py::arg("field"), py::arg("a"));
  m.def("spectral_derivative", &spectral_derivative, py::arg("field"), py::arg("order"));
  m.def("oracle_gaussian", &oracle_gaussian, py::arg("kappa"), py::arg("t"), py::arg("z"), py::arg("grid"));
  m.def("oracle_counterexample", &oracle_counterexample, py::arg("t"), py::arg("grid"));
  m.def("relative_l2_error", &relative_l2_error);
  m.def(
      "gaussian_weighted_log_norm",
      [](const WaveField& f, double gamma) {
        const WeightedNorm n = weighted_l2_norm(f, GaussianWeight{gamma});
        return py::make_tuple(n.log_norm, n.divergent);
      },
      py::arg("field"), py::arg("gamma"));
  m.def(
      "evolve",
      [](const WaveField& f, const std::string& potential, double amplitude, cplx z, double t_final, double dt,
         std::size_t sample_every) {
        const Trajectory tr = split_step_evolve(f, potential_by_id(potential, amplitude), z, t_final, dt, sample_every);
        return tr.fields;
      },
      py::arg("field"), py::arg("potential") = "zero", py::arg("amplitude") = 0.0, py::arg("z") = cplx(0.0, 1.0),
      py::arg("t_final") = 1.0, py::arg("dt") = 1e-3, py::arg("sample_every") = 10);
  m.def("airy_function", &airy_function, py::arg("x"));
  m.def("hardy_threshold_exponent", &hardy_threshold_exponent, py::arg("gamma"), py::arg("eps"), py::arg("delta"),
        py::arg("C") = 1.0);
  m.def(
      "threshold_scan",
      [](const std::vector<double>& gammas, double eps_max) {
        const ThresholdScan s = threshold_scan(gammas, eps_max);
        py::list rows;
        for (const auto& r : s.rows) rows.append(py::make_tuple(r.gamma, r.sup_E, r.argmax_eps));
        py::dict d;
        d["rows"] = rows;
        d["sign_changes"] = s.sign_changes;
        d["sign_change_cell"] = s.sign_change_cell ? py::cast(*s.sign_change_cell) : py::none();
        d["change_at_half"] = s.change_at_half;
        return d;
      },
      py::arg("gammas"), py::arg("eps_max") = 0.5);
  m.def(
      "convexity_carleman",
      [](const std::string& test_id, double R, double eps, double gamma) {
        ConvexityCarlemanCase c;
        c.test_id = test_id;
        c.R = R;
        c.eps = eps;
        c.gamma = gamma;
        const CarlemanReport r = convexity_carleman(c);
        py::dict d;
        d["mu"] = r.mu;
        d["log_lhs"] = r.log_lhs;
        d["log_rhs"] = r.log_rhs;
        d["ratio"] = r.ratio;
        d["passed"] = r.passed;
        d["prefactor_exact"] = r.prefactor_exact;
        d["resolved"] = r.resolved;
        return d;
      },
      py::arg("test_id") = "bump-1", py::arg("R") = 8.0, py::arg("eps") = 0.1, py::arg("gamma") = 0.6);

  m.def("identity_names", &weyl::identity_names);
  m.def(
      "verify_identity", [](const std::string& name) { return as_py(weyl::verify_identity(name).json()); },
      py::arg("name"));

  m.def("experiment_names", &lab::experiment_names);
  m.def(
      "config_roundtrip", [](const std::string& yaml) { return lab::RunConfig::parse(yaml).to_yaml(); },
      py::arg("yaml"));
  m.def(
      "run_experiment",
      [](const std::string& yaml, const std::filesystem::path& out) {
        return as_py(lab::run_experiment(lab::RunConfig::parse(yaml), out).json());
      },
      py::arg("config_yaml"), py::arg("out_dir"));
  m.def(
      "evaluate_criterion",
      [](int id, const std::string& profile) {
        lab::SuiteOptions o;
        o.profile = profile;
        const lab::CriterionResult r = lab::evaluate_criterion(id, o);
        py::list checks;
        for (const auto& c : r.checks) checks.append(check_dict(c));
        py::dict d;
        d["id"] = r.id;
        d["title"] = r.title;
        d["passed"] = r.passed;
        d["checks"] = checks;
        d["error"] = r.error;
        return d;
      },
      py::arg("id"), py::arg("profile") = "quick");
}
