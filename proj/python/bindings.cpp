#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dopmeter/analysis.hpp"
#include "dopmeter/error.hpp"

namespace py = pybind11;
using namespace dopmeter;

namespace {

Axis parse_axis(const std::string& s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  throw InvalidArgument("axis must be one of x, y, z");
}

Assignment parse_assignment(const std::string& s) {
  if (s == "A" || s == "desired") return Assignment::Desired;
  if (s == "B" || s == "perturbing") return Assignment::Perturbing;
  throw InvalidArgument("assignment must be 'A' or 'B'");
}

SfgProcess process(double l1, double l2, const std::string& assignment, double length) {
  return {l1, l2, parse_assignment(assignment), length, {}};
}

py::dict sweep_dict(const SweepResult& r) {
  py::dict d;
  d["theta"] = r.theta;
  d["phi"] = r.phi;
  d["intensity"] = r.intensity;
  d["expected"] = r.expected;
  d["counts"] = r.counts;
  d["mean_counts"] = r.count_stats.mean;
  d["std_counts"] = r.count_stats.stddev;
  d["mean_intensity"] = r.intensity_stats.mean;
  d["std_intensity"] = r.intensity_stats.stddev;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Singlet-projection DOP meter model";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  // polarization
  m.def("dop_bichromatic", &dop_bichromatic, py::arg("i1"), py::arg("i2"), py::arg("phi"));
  m.def(
      "singlet_overlap",
      [](std::pair<Complex, Complex> a, std::pair<Complex, Complex> b) {
        return singlet_overlap({a.first, a.second}, {b.first, b.second});
      },
      py::arg("a"), py::arg("b"), "Overlap of two Jones vectors (ex, ey) with the singlet.");

  // dispersion
  py::class_<Material>(m, "Material")
      .def_readonly("name", &Material::name)
      .def_readonly("source", &Material::source)
      .def_property_readonly("validity_um",
                             [](const Material& x) {
                               return std::make_pair(x.validity_lo_um, x.validity_hi_um);
                             })
      .def("__repr__", [](const Material& x) { return "<Material " + x.name + ">"; });
  m.def("load_material", &load_material, py::arg("path"));
  m.def("parse_material", &parse_material, py::arg("json_text"));
  m.def(
      "index", [](const Material& mat, const std::string& axis, double l) { return index(mat, parse_axis(axis), l); },
      py::arg("material"), py::arg("axis"), py::arg("wavelength"));
  m.def("index_e_xz", &index_e_xz, py::arg("material"), py::arg("theta"), py::arg("wavelength"));
  m.def("walkoff_xz", &walkoff_xz, py::arg("material"), py::arg("theta"), py::arg("wavelength"));

  // phasematch
  m.def(
      "pm_angle",
      [](const Material& mat, double l1, double l2, const std::string& a, double length) {
        return pm_angle(mat, process(l1, l2, a, length));
      },
      py::arg("material"), py::arg("lambda1"), py::arg("lambda2"), py::arg("assignment") = "A",
      py::arg("length") = 3e-3);
  m.def(
      "angular_fwhm",
      [](const Material& mat, double l1, double l2, const std::string& a, double length) {
        return angular_fwhm(mat, process(l1, l2, a, length));
      },
      py::arg("material"), py::arg("lambda1"), py::arg("lambda2"), py::arg("assignment") = "A",
      py::arg("length") = 3e-3);
  m.def("alpha", &alpha, py::arg("material"), py::arg("lambda1"), py::arg("lambda2"),
        py::arg("length") = 3e-3);
  m.def(
      "lambda1_limit", [](const Material& mat, double l1, double length) { return lambda1_limit(mat, l1, length); },
      py::arg("material"), py::arg("lambda1"), py::arg("length") = 3e-3);
  m.def(
      "pm_curve",
      [](const Material& mat, double l1, std::vector<double> grid, double length) {
        py::list rows;
        for (const auto& p : pm_curve(mat, l1, grid, length).points) {
          py::dict d;
          d["lambda2"] = p.lambda2;
          d["theta_a"] = p.theta_a;
          d["theta_b"] = p.theta_b;
          d["fwhm"] = p.fwhm;
          rows.append(d);
        }
        return rows;
      },
      py::arg("material"), py::arg("lambda1"), py::arg("lambda2_grid"), py::arg("length") = 3e-3);

  // projection
  py::class_<InstrumentConfig>(m, "InstrumentConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &InstrumentConfig::alpha)
      .def_readwrite("crystal2_rot_err", &InstrumentConfig::crystal2_rot_err)
      .def_readwrite("waveplate_axis_err", &InstrumentConfig::waveplate_axis_err)
      .def_readwrite("waveplate_retardance", &InstrumentConfig::waveplate_retardance)
      .def_readwrite("polarizer_angle", &InstrumentConfig::polarizer_angle)
      .def_readwrite("visibility", &InstrumentConfig::visibility)
      .def_readwrite("count_scale", &InstrumentConfig::count_scale)
      .def_readwrite("dark_rate", &InstrumentConfig::dark_rate);
  m.def(
      "singlet_intensity",
      [](double theta, double phi, const InstrumentConfig& cfg, double e1, double e2) {
        SourceConfig s;
        s.pol = {theta, phi, e1, e2};
        return singlet_intensity(s, cfg);
      },
      py::arg("theta"), py::arg("phi"), py::arg("config") = InstrumentConfig{}, py::arg("e1") = 1.0,
      py::arg("e2") = 1.0);
  m.def(
      "degenerate_intensity",
      [](double theta, double phi, const InstrumentConfig& cfg, double e1, double e2) {
        SourceConfig s;
        s.lambda2 = s.lambda1;
        s.pol = {theta, phi, e1, e2};
        return detect_intensity(degenerate_amplitudes(s, cfg), cfg);
      },
      py::arg("theta"), py::arg("phi"), py::arg("config") = InstrumentConfig{}, py::arg("e1") = 1.0,
      py::arg("e2") = 1.0);
  m.def(
      "sweep",
      [](const InstrumentConfig& cfg, std::vector<double> theta, std::vector<double> phi,
         double integration_time, std::uint64_t seed, unsigned threads) {
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = sweep(SourceConfig{}, cfg, theta, phi, {integration_time, seed, threads});
        }
        return sweep_dict(r);
      },
      py::arg("config"), py::arg("theta") = default_theta_grid(), py::arg("phi") = default_phi_grid(),
      py::arg("integration_time") = 1.0, py::arg("seed") = 1, py::arg("threads") = 0);

  // analysis
  py::class_<FitResult>(m, "FitResult")
      .def_property_readonly("model", [](const FitResult& f) { return to_string(f.model); })
      .def_readonly("a", &FitResult::a)
      .def_readonly("b", &FitResult::b)
      .def_readonly("c", &FitResult::c)
      .def_readonly("d", &FitResult::d)
      .def_readonly("half_a", &FitResult::half_a)
      .def_readonly("half_b", &FitResult::half_b)
      .def_readonly("half_c", &FitResult::half_c)
      .def_readonly("residual_rms", &FitResult::residual_rms)
      .def_readonly("n_points", &FitResult::n_points)
      .def("evaluate", &FitResult::evaluate, py::arg("phi"));
  m.def(
      "visibility", [](std::vector<double> means) { return visibility(means); }, py::arg("phi_means"));
  m.def(
      "fit", [](const std::string& model, std::vector<double> phi, std::vector<double> y) {
        return fit(parse_fit_model(model), phi, y);
      },
      py::arg("model"), py::arg("phi"), py::arg("y"));
  m.def(
      "lambda2_limit",
      [](const Material& mat, double l1, double length, double v, double thr) {
        return lambda2_limit(mat, l1, length, v, thr);
      },
      py::arg("material"), py::arg("lambda1"), py::arg("length") = 3e-3, py::arg("visibility") = 0.9,
      py::arg("snr_threshold") = 1.0);
  m.def(
      "regimes",
      [](const Material& mat, double l1, double length, double v, double queried, double thr) {
        const RegimeReport r = regimes(mat, l1, length, v, queried, thr);
        py::dict d;
        d["lambda1_limit"] = r.lambda1_limit;
        d["lambda2_limit"] = r.lambda2_limit;
        d["queried"] = r.queried;
        d["regime"] = to_string(r.regime);
        return d;
      },
      py::arg("material"), py::arg("lambda1"), py::arg("length"), py::arg("visibility"),
      py::arg("queried"), py::arg("snr_threshold") = 1.0);
  m.def("dop_estimate", &dop_estimate, py::arg("fit"), py::arg("reference_max"), py::arg("phi"));
}
