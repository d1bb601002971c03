#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>

#include "dispcancel/analytic.hpp"
#include "dispcancel/commands.hpp"
#include "dispcancel/config.hpp"
#include "dispcancel/errors.hpp"
#include "dispcancel/montecarlo.hpp"

namespace py = pybind11;
using namespace dispcancel;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict state_dict(const StateClass& s) {
  py::dict d;
  d["label"] = std::string(to_string(s.label));
  d["worst_margin"] = s.worst_margin;
  d["worst_omega"] = s.worst_omega;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Photocurrent cross-correlation toolkit";
  m.attr("__version__") = DISPCANCEL_VERSION;

  static py::exception<Error> base(m, "DispcancelError", PyExc_RuntimeError);
  static py::exception<DomainError> domain(m, "DomainError", base.ptr());
  static py::exception<ConfigurationError> configuration(m, "ConfigurationError", base.ptr());
  static py::exception<SemiclassicalError> semiclassical(m, "SemiclassicalError", base.ptr());
  static py::exception<FactorizationError> factorization(m, "FactorizationError", base.ptr());
  static py::exception<DegenerateSourceError> degenerate(m, "DegenerateSourceError", base.ptr());
  static py::exception<WidthUndefinedError> width(m, "WidthUndefinedError", base.ptr());
  static py::exception<UnsupportedError> unsupported(m, "UnsupportedError", base.ptr());
  static py::exception<ValidationError> validation(m, "ValidationError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      py::set_error(validation, e.what());
    } catch (const DomainError& e) {
      py::set_error(domain, e.what());
    } catch (const ConfigurationError& e) {
      py::set_error(configuration, e.what());
    } catch (const SemiclassicalError& e) {
      py::set_error(semiclassical, e.what());
    } catch (const FactorizationError& e) {
      py::set_error(factorization, e.what());
    } catch (const DegenerateSourceError& e) {
      py::set_error(degenerate, e.what());
    } catch (const WidthUndefinedError& e) {
      py::set_error(width, e.what());
    } catch (const UnsupportedError& e) {
      py::set_error(unsupported, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<SpectralGrid>(m, "SpectralGrid")
      .def(py::init<std::size_t, double>(), py::arg("n"), py::arg("dt"))
      .def_property_readonly("n", &SpectralGrid::size)
      .def_property_readonly("dt", &SpectralGrid::dt)
      .def_property_readonly("duration", &SpectralGrid::duration)
      .def_property_readonly("domega", &SpectralGrid::domega)
      .def("taus", [](const SpectralGrid& g) { return to_array(g.taus()); })
      .def("omegas", [](const SpectralGrid& g) { return to_array(g.omegas()); });

  py::enum_<GaussianKind>(m, "GaussianKind")
      .value("quantum", GaussianKind::quantum)
      .value("classical", GaussianKind::classical);

  py::class_<JointGaussianSource>(m, "Source")
      .def_static("gaussian", &JointGaussianSource::gaussian, py::arg("P"), py::arg("T0"),
                  py::arg("kind") = GaussianKind::quantum)
      .def_static("rect_noise", &JointGaussianSource::rect_noise, py::arg("P"), py::arg("Omega"),
                  py::arg("G") = 1.0)
      .def_static("sinc", &JointGaussianSource::sinc, py::arg("g0"), py::arg("Dl"))
      .def_property_readonly("family",
                             [](const JointGaussianSource& s) { return std::string(to_string(s.family())); })
      .def("at", [](const JointGaussianSource& s, double w) {
        const SpectralTriple t = s.at(w);
        return py::make_tuple(t.ss, t.rr, t.sr);
      });

  py::class_<Detector>(m, "Detector")
      .def_static("gaussian", &Detector::gaussian, py::arg("Tg"), py::arg("eta") = 1.0,
                  py::arg("q") = 1.0)
      .def_static("ideal", &Detector::instantaneous, py::arg("eta") = 1.0, py::arg("q") = 1.0)
      .def_readonly("eta", &Detector::eta)
      .def_readonly("q", &Detector::q)
      .def_property_readonly("Tg", [](const Detector& d) { return d.response_time; });

  py::class_<FilterPair>(m, "FilterPair")
      .def(py::init<>())
      .def_static("balanced", &FilterPair::balanced, py::arg("beta"), py::arg("omega0") = 0.0)
      .def_property_readonly("beta_signal", [](const FilterPair& f) { return f.signal.beta; })
      .def_property_readonly("beta_reference", [](const FilterPair& f) { return f.reference.beta; });

  py::class_<CrossCorrResult>(m, "CrossCorrResult")
      .def_property_readonly("tau", [](const CrossCorrResult& r) { return to_array(r.tau); })
      .def_property_readonly("c", [](const CrossCorrResult& r) { return to_array(r.c); })
      .def_property_readonly("c_dc", [](const CrossCorrResult& r) { return to_array(r.c_dc); })
      .def_readonly("c_acc", &CrossCorrResult::c_acc);

  m.def("classify_state",
        [](const JointGaussianSource& s, const SpectralGrid& g, double tol) {
          return state_dict(classify_state(s, g, tol));
        },
        py::arg("source"), py::arg("grid"), py::arg("tol") = kDefaultSaturationTolerance);
  m.def("cross_correlation",
        py::overload_cast<const JointGaussianSource&, const FilterPair&, const Detector&,
                          const SpectralGrid&>(&cross_correlation),
        py::arg("source"), py::arg("filters"), py::arg("detector"), py::arg("grid"),
        py::call_guard<py::gil_scoped_release>());
  m.def("closed_form_gaussian", &closed_form_gaussian, py::arg("P"), py::arg("T0"),
        py::arg("detector"), py::arg("kind"), py::arg("grid"));
  m.def("contrast", &contrast, py::arg("result"));
  m.def("signature_width", &signature_width, py::arg("result"));
  m.def("critical_gain", &critical_gain, py::arg("P"), py::arg("Omega"));
  m.def("contrast_rect", &contrast_rect, py::arg("P"), py::arg("Omega"), py::arg("G"));
  m.def("high_brightness_delta", &high_brightness_delta, py::arg("P"), py::arg("T0"),
        py::arg("Tg") = 0.0);

  m.def("parse_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
        py::arg("text"), "Validate a scenario document and return its canonical form.");

  m.def("analyze",
        [](const std::string& text) {
          const ScenarioConfig c = parse_config(text);
          check_grid_adequacy(c.source, c.detector, c.grid);
          CrossCorrResult r;
          {
            py::gil_scoped_release release;
            r = cross_correlation(c.scenario());
          }
          py::dict d;
          d["tau"] = to_array(r.tau);
          d["C"] = to_array(r.c);
          d["C_dc"] = to_array(r.c_dc);
          d["C_acc"] = r.c_acc;
          d["contrast"] = contrast(r);
          try {
            d["fwhm"] = signature_width(r);
          } catch (const WidthUndefinedError&) {
            d["fwhm"] = py::none();
          }
          d["classification"] = state_dict(classify_state(c.source, c.grid, c.classify_tol));
          return d;
        },
        py::arg("config"));

  m.def("bounds",
        [](const std::string& text) {
          const ScenarioConfig c = parse_config(text);
          return state_dict(classify_state(c.source, c.grid, c.classify_tol));
        },
        py::arg("config"));

  m.def("montecarlo",
        [](const std::string& text, std::size_t threads) {
          const ScenarioConfig c = parse_config(text);
          if (!c.montecarlo) throw ValidationError("montecarlo", "block is required");
          MCEstimate e;
          {
            py::gil_scoped_release release;
            e = estimate_C(c.mc_config(threads), c.scenario());
          }
          py::dict d;
          d["tau"] = to_array(e.tau);
          d["C"] = to_array(e.c);
          d["stderr"] = to_array(e.standard_error);
          d["C_dc"] = to_array(e.c_dc);
          d["C_acc"] = e.c_acc;
          d["trials"] = e.trials;
          d["seed"] = c.montecarlo->seed;
          d["mean_events_signal"] = e.mean_events_signal;
          d["mean_events_reference"] = e.mean_events_reference;
          d["warnings"] = e.warnings;
          return d;
        },
        py::arg("config"), py::arg("threads") = 0);

  m.def("run_cli",
        [](std::vector<std::string> args) {
          args.insert(args.begin(), "dispcancel");
          std::vector<const char*> argv;
          for (const auto& a : args) argv.push_back(a.c_str());
          return run_cli(static_cast<int>(argv.size()), argv.data(), std::cout, std::cerr);
        },
        py::arg("args"), "Run the command-line interface in-process and return its exit code.");
}
