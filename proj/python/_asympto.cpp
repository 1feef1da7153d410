#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "asympto/cli.hpp"
#include "asympto/error.hpp"

namespace py = pybind11;
using namespace asympto;
using cd = std::complex<double>;

namespace {

// Reports cross the boundary as JSON text; the Python side parses them so
// the dictionaries match the CLI payloads key for key.
std::string dump(const cli::json& j) { return j.dump(); }

Window window_of(std::size_t lo, std::size_t hi) { return Window{lo, hi}; }

}  // namespace

PYBIND11_MODULE(_asympto, m) {
  m.doc() = "Native core of the asympto package";
  m.attr("__version__") = cli::kVersion;

  static py::exception<Error> err(m, "AsymptoError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = err;
      py::object inst = exc(e.what());
      inst.attr("kind") = to_string(e.kind());
      PyErr_SetObject(err.ptr(), inst.ptr());
    }
  });

  py::class_<WeightSequence>(m, "WeightSequence")
      .def_static("gevrey", &WeightSequence::gevrey, py::arg("alpha"), py::arg("window") = WeightSequence::kGevreyWindow)
      .def_static("gevrey_log", &WeightSequence::gevrey_log, py::arg("alpha"), py::arg("beta"),
                  py::arg("window") = WeightSequence::kGevreyWindow)
      .def_static("q_gevrey", &WeightSequence::q_gevrey, py::arg("q"), py::arg("alpha"),
                  py::arg("window") = WeightSequence::kPolyExpWindow)
      .def_static("power_sigma", &WeightSequence::power_sigma, py::arg("tau"), py::arg("sigma"),
                  py::arg("window") = WeightSequence::kPolyExpWindow)
      .def_static("qpp", &WeightSequence::qpp, py::arg("q"), py::arg("window") = WeightSequence::kQppWindow)
      .def_static("table", &WeightSequence::table, py::arg("log_m"), py::arg("label") = "table")
      .def_static("from_spec", [](const std::string& spec) { return cli::sequence_from_json(cli::json::parse(spec)); })
      .def("log_M", &WeightSequence::log_M)
      .def("log_m", &WeightSequence::log_m)
      .def_property_readonly("window", &WeightSequence::window)
      .def_property_readonly("label", &WeightSequence::label)
      .def("__repr__", [](const WeightSequence& s) { return "<WeightSequence " + s.label() + ">"; });

  m.def("_check_condition",
        [](const WeightSequence& M, const std::string& cond, std::size_t lo, std::size_t hi) {
          return dump(cli::to_json(check_condition(M, parse_condition(cond), window_of(lo, hi))));
        });
  m.def("h_eval", &h_eval, py::arg("M"), py::arg("t"), "log h_M(t)");
  m.def("recover_Mp", [](const WeightSequence& M, std::size_t p, std::size_t window_end) {
    const auto grid = default_recovery_grid(M, window_end);
    return recover_Mp(M, p, grid);
  });
  m.def("_gamma_estimate", [](const WeightSequence& M, std::size_t lo, std::size_t hi, double res) {
    return dump(cli::to_json(gamma_estimate(M, window_of(lo, hi), res)));
  });
  m.def("log_moments", [](double alpha, std::size_t p_max, double opening) {
    return moments(FlatFunction::gevrey_exp(alpha, SectorSpec{0.0, opening, std::nullopt}), p_max).log_mu;
  }, py::arg("alpha"), py::arg("p_max"), py::arg("opening") = 0.5);

  m.def("mittag_leffler", [](double alpha, cd w) { return MittagLeffler(alpha)(w); }, py::arg("alpha"), py::arg("w"));
  m.def("alpha_laplace",
        [](const std::function<cd(cd)>& f, double alpha, cd z, double tau, double C, double k, double rho) {
          return analytic_alpha_laplace(f, GrowthCap{C, k, rho}, alpha, tau, z);
        },
        py::arg("f"), py::arg("alpha"), py::arg("z"), py::arg("tau") = 0.0, py::arg("C") = 1.0, py::arg("k") = 0.0,
        py::arg("rho") = 0.0);
  m.def("alpha_borel",
        [](const std::function<cd(cd)>& f, double alpha, cd u, double opening, double radius, double tau,
           double path_radius) {
          return analytic_alpha_borel(f, SectorSpec{tau, opening, radius}, alpha, BorelPath{tau, path_radius}, u);
        },
        py::arg("f"), py::arg("alpha"), py::arg("u"), py::arg("opening"), py::arg("radius") = 1.0,
        py::arg("tau") = 0.0, py::arg("path_radius") = 0.5);
  m.def("formal_alpha_laplace", [](const std::vector<cd>& c, double alpha) {
    const FormalSeries f = formal_alpha_laplace(FormalSeries::from_coeffs(c), alpha);
    std::vector<cd> out(f.size());
    for (std::size_t p = 0; p < f.size(); ++p) out[p] = f.coeff(p);
    return out;
  });

  m.def("_examples_matrix", [] {
    cli::json rows = cli::json::array();
    for (const auto& r : cli::examples_matrix())
      rows.push_back({{"family", r.family}, {"condition", r.condition}, {"expected_holds", r.expected_holds},
                      {"match", r.match()}, {"report", cli::to_json(r.report)}});
    return dump(rows);
  });
  m.def("_run_command", [](const std::vector<std::string>& args) { return dump(cli::run_command(args).to_json()); });
}
