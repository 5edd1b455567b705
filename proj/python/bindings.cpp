#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lppl/error.hpp"
#include "lppl/fitter.hpp"
#include "lppl/io.hpp"
#include "lppl/mc.hpp"
#include "lppl/model.hpp"
#include "lppl/objective.hpp"
#include "lppl/sloppy.hpp"
#include "lppl/synth.hpp"

namespace py = pybind11;
using namespace lppl;

namespace {

std::vector<std::string> names_of(const std::vector<Param>& params) {
  std::vector<std::string> out;
  for (Param p : params) out.emplace_back(kParamNames[static_cast<int>(p)]);
  return out;
}

py::array_t<double> to_array(std::span<const double> x) {
  return py::array_t<double>(static_cast<py::ssize_t>(x.size()), x.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Log-periodic power-law fitting, sloppiness analysis and Monte Carlo";
  m.attr("__version__") = LPPL_VERSION;

  static py::exception<Error> lppl_error(m, "LpplError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(lppl_error.ptr())(e.what());
      err.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(lppl_error.ptr(), err.ptr());
    }
  });

  py::enum_<ModelKind>(m, "ModelKind")
      .value("LPPL", ModelKind::Lppl)
      .value("POWER_LAW", ModelKind::PowerLaw);

  py::enum_<FitStatus>(m, "FitStatus")
      .value("GRADIENT_TOLERANCE", FitStatus::GradientTolerance)
      .value("STEP_TOLERANCE", FitStatus::StepTolerance)
      .value("EXACT_FIT", FitStatus::ExactFit)
      .value("MAX_ITERATIONS", FitStatus::MaxIterations)
      .value("ALL_STEPS_REJECTED", FitStatus::AllStepsRejected)
      .value("DIVERGED", FitStatus::Diverged);

  m.attr("PARAM_NAMES") = std::vector<std::string>(kParamNames.begin(), kParamNames.end());

  py::class_<LpplParams>(m, "LpplParams")
      .def(py::init([](double A, double B, double C, double t_c, double alpha, double omega,
                       double phi) { return LpplParams{A, B, C, t_c, alpha, omega, phi}; }),
           py::arg("A") = 0.0, py::arg("B") = 0.0, py::arg("C") = 0.0, py::arg("t_c") = 0.0,
           py::arg("alpha") = 0.0, py::arg("omega") = 0.0, py::arg("phi") = 0.0)
      .def_readwrite("A", &LpplParams::A)
      .def_readwrite("B", &LpplParams::B)
      .def_readwrite("C", &LpplParams::C)
      .def_readwrite("t_c", &LpplParams::t_c)
      .def_readwrite("alpha", &LpplParams::alpha)
      .def_readwrite("omega", &LpplParams::omega)
      .def_readwrite("phi", &LpplParams::phi)
      .def("to_list", [](const LpplParams& p) {
        const auto a = p.to_array();
        return std::vector<double>(a.begin(), a.end());
      })
      .def("__eq__", [](const LpplParams& a, const LpplParams& b) { return a == b; })
      .def("__repr__", [](const LpplParams& p) { return dump_json(params_to_json(p), 0); });

  py::class_<PriceSeries>(m, "PriceSeries")
      .def(py::init([](std::int64_t t0, const std::vector<double>& values, bool log_scale) {
             return PriceSeries(t0, values, log_scale ? Scale::Log : Scale::Raw);
           }),
           py::arg("t0"), py::arg("values"), py::arg("log_scale") = false)
      .def_property_readonly("t0", &PriceSeries::t0)
      .def_property_readonly("t1", &PriceSeries::t1)
      .def_property_readonly("values", [](const PriceSeries& s) { return to_array(s.values()); })
      .def_property_readonly("log_scale",
                             [](const PriceSeries& s) { return s.scale() == Scale::Log; })
      .def("truncated", &PriceSeries::truncated, py::arg("last"))
      .def("__len__", &PriceSeries::size);

  m.def("load_csv", [](const std::string& path, bool log_scale) { return load_csv(path, log_scale); },
        py::arg("path"), py::arg("log_scale") = false);
  m.def("parse_csv", [](const std::string& text, bool log_scale) { return parse_csv(text, log_scale); },
        py::arg("text"), py::arg("log_scale") = false);
  m.def("series_to_csv", &series_to_csv);

  m.def("eval_lppl",
        [](const LpplParams& p, py::object t) {
          return py::vectorize([&p](double x) { return eval_lppl(p, x); })(t);
        },
        py::arg("params"), py::arg("t"));
  m.def("eval_power_law",
        [](const LpplParams& p, py::object t) {
          return py::vectorize([&p](double x) { return eval_power_law(p, x); })(t);
        },
        py::arg("params"), py::arg("t"));
  m.def("grad_lppl", [](const LpplParams& p, double t) {
        const auto g = grad_lppl(p, t);
        return std::vector<double>(g.begin(), g.end());
      }, py::arg("params"), py::arg("t"));

  m.def("normalized_sse", &normalized_sse, py::arg("params"), py::arg("series"),
        py::arg("model") = ModelKind::Lppl);
  m.def("linear_subfit",
        [](double t_c, double alpha, double omega, double phi, const PriceSeries& s, ModelKind kind) {
          const LinearSubfit r = linear_subfit({t_c, alpha, omega, phi}, s, kind);
          return py::dict(py::arg("A") = r.A, py::arg("B") = r.B, py::arg("C") = r.C,
                          py::arg("S") = r.s);
        },
        py::arg("t_c"), py::arg("alpha"), py::arg("omega"), py::arg("phi"), py::arg("series"),
        py::arg("model") = ModelKind::Lppl);

  py::class_<FitConfig>(m, "FitConfig")
      .def(py::init<>())
      .def_readwrite("max_iters", &FitConfig::max_iters)
      .def_readwrite("grad_tol", &FitConfig::grad_tol)
      .def_readwrite("step_tol", &FitConfig::step_tol)
      .def_readwrite("damping_init_factor", &FitConfig::damping_init_factor)
      .def_readwrite("damping_scale", &FitConfig::damping_scale)
      .def_readwrite("n_starts", &FitConfig::n_starts)
      .def_readwrite("seed", &FitConfig::seed)
      .def_readwrite("model", &FitConfig::model)
      .def_readwrite("tc_escape_factor", &FitConfig::tc_escape_factor)
      .def_readwrite("threads", &FitConfig::threads)
      .def("to_json", [](const FitConfig& c) { return dump_json(fit_config_to_json(c)); });

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("params", &FitResult::params)
      .def_readonly("S", &FitResult::s)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("start_index", &FitResult::start_index)
      .def_readonly("status", &FitResult::status)
      .def_readonly("model", &FitResult::model)
      .def_readonly("s_trace", &FitResult::s_trace)
      .def("to_json", [](const FitResult& r) { return dump_json(fit_to_json(r)); });

  m.def("lm_fit",
        [](const PriceSeries& s, double t_c, double alpha, double omega, double phi,
           const FitConfig& c) { return lm_fit(s, {t_c, alpha, omega, phi}, c); },
        py::arg("series"), py::arg("t_c"), py::arg("alpha"), py::arg("omega"), py::arg("phi"),
        py::arg("config") = FitConfig{}, py::call_guard<py::gil_scoped_release>());
  m.def("multistart_fit", &multistart_fit, py::arg("series"), py::arg("config") = FitConfig{},
        py::call_guard<py::gil_scoped_release>());

  m.def("hessian_of_s",
        [](const LpplParams& p, const PriceSeries& s, ModelKind kind) {
          const HessianMatrix h = hessian_of_s(p, s, kind);
          return py::make_tuple(names_of(h.params), h.entries);
        },
        py::arg("params"), py::arg("series"), py::arg("model") = ModelKind::Lppl);

  py::class_<SloppinessReport>(m, "SloppinessReport")
      .def_property_readonly("params", [](const SloppinessReport& r) { return names_of(r.params); })
      .def_readonly("eigenvalues", &SloppinessReport::eigenvalues)
      .def_readonly("eigenvectors", &SloppinessReport::eigenvectors)
      .def_readonly("orders_of_separation", &SloppinessReport::orders_of_separation)
      .def_property_readonly("major_components",
                             [](const SloppinessReport& r) {
                               std::vector<std::vector<std::string>> out;
                               for (const auto& v : r.major_components) out.push_back(names_of(v));
                               return out;
                             })
      .def("to_json", [](const SloppinessReport& r) { return dump_json(report_to_json(r)); });

  m.def("sloppiness_report",
        [](const LpplParams& p, const PriceSeries& s, ModelKind kind) {
          return sloppiness_report(hessian_of_s(p, s, kind));
        },
        py::arg("params"), py::arg("series"), py::arg("model") = ModelKind::Lppl,
        "Hessian of S at params followed by its eigen-analysis.");

  py::class_<EigenTrack>(m, "EigenTrack")
      .def_readonly("dates", &EigenTrack::dates)
      .def_readonly("spectra", &EigenTrack::spectra)
      .def_readonly("crossings", &EigenTrack::crossings)
      .def_readonly("missing", &EigenTrack::missing);
  m.def("rolling_track", &rolling_track, py::arg("series"), py::arg("tc"),
        py::arg("horizon") = 150, py::arg("stride") = 10, py::arg("config") = FitConfig{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<SynthSpec>(m, "SynthSpec")
      .def(py::init([](const LpplParams& truth, double lambda, double sigma, std::uint64_t seed,
                       std::int64_t length, std::int64_t t0) {
             SynthSpec s{truth, {lambda, sigma, seed}, length, t0};
             s.validate();
             return s;
           }),
           py::arg("truth"), py::arg("lambda_") = 0.06, py::arg("sigma") = 25.0,
           py::arg("seed") = 1987, py::arg("length") = 834, py::arg("t0") = 0)
      .def_readwrite("truth", &SynthSpec::truth)
      .def_property("sigma", [](const SynthSpec& s) { return s.noise.sigma; },
                    [](SynthSpec& s, double v) { s.noise.sigma = v; })
      .def_property("lambda_", [](const SynthSpec& s) { return s.noise.lambda; },
                    [](SynthSpec& s, double v) { s.noise.lambda = v; })
      .def_property("seed", [](const SynthSpec& s) { return s.noise.seed; },
                    [](SynthSpec& s, std::uint64_t v) { s.noise.seed = v; })
      .def_readwrite("length", &SynthSpec::length)
      .def_readwrite("t0", &SynthSpec::t0);
  m.def("reference_1987_spec", &reference_1987_spec, py::arg("seed") = 1987);
  m.def("make_series", &make_series, py::arg("spec"));
  m.def("ar1_generate",
        [](double lambda, double sigma, std::uint64_t seed, std::int64_t length) {
          return to_array(ar1_generate({lambda, sigma, seed}, length));
        },
        py::arg("lambda_"), py::arg("sigma"), py::arg("seed"), py::arg("length"));

  py::class_<McConfig>(m, "McConfig")
      .def(py::init<>())
      .def_readwrite("spec", &McConfig::spec)
      .def_readwrite("n_samples", &McConfig::n_samples)
      .def_readwrite("window_ends", &McConfig::window_ends)
      .def_readwrite("fit_config", &McConfig::fit_config)
      .def_readwrite("confidence_levels", &McConfig::confidence_levels)
      .def_readwrite("threads", &McConfig::threads);

  py::class_<McRow>(m, "McRow")
      .def_readonly("window_end", &McRow::window_end)
      .def_readonly("n_used", &McRow::n_used)
      .def_readonly("n_failed", &McRow::n_failed)
      .def_readonly("mean_tc", &McRow::mean_tc)
      .def_readonly("std_tc", &McRow::std_tc)
      .def_readonly("bias", &McRow::bias)
      .def_property_readonly("windows",
                             [](const McRow& r) {
                               std::vector<std::pair<double, double>> out;
                               for (const Interval& w : r.windows) out.emplace_back(w.lo, w.hi);
                               return out;
                             })
      .def_readonly("samples", &McRow::samples);

  py::class_<McSummary>(m, "McSummary")
      .def_readonly("true_tc", &McSummary::true_tc)
      .def_readonly("levels", &McSummary::levels)
      .def_readonly("rows", &McSummary::rows)
      .def("to_csv", &mc_to_csv);

  m.def("run_mc", &run_mc, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("confidence_window",
        [](double mean, double std_dev, double level) {
          const Interval w = confidence_window(mean, std_dev, level);
          return py::make_tuple(w.lo, w.hi);
        },
        py::arg("mean"), py::arg("std"), py::arg("level"));
  m.def("gaussianity_check",
        [](const std::vector<double>& samples) {
          const GaussianityResult g = gaussianity_check(samples);
          return py::dict(py::arg("skewness") = g.skewness,
                          py::arg("excess_kurtosis") = g.excess_kurtosis,
                          py::arg("z_skewness") = g.z_skewness,
                          py::arg("z_kurtosis") = g.z_kurtosis, py::arg("pass") = g.pass);
        },
        py::arg("samples"));
}
