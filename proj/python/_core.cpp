#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msol/acceptance.hpp"
#include "msol/commands.hpp"
#include "msol/common.hpp"
#include "msol/config.hpp"

namespace py = pybind11;
using namespace msol;

namespace {

ExperimentConfig config_from(const std::string& text) { return parse_config(Json::parse(text)); }

py::tuple run(const std::string& command, const std::string& config) {
  RunReport rep;
  {
    py::gil_scoped_release nogil;
    rep = run_command(command, config_from(config));
  }
  py::dict files;
  for (const auto& [name, body] : rep.files) files[py::str(name)] = py::bytes(body);
  return py::make_tuple(rep.to_json().dump(), files, rep.ok, rep.wall_seconds);
}

TorusForm form_from(const std::string& text, int n) { return parse_form(Json::parse(text), n, "form"); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "msol native core";
  m.attr("__version__") = kToolVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);

  m.def("command_names", &command_names);
  m.def("run_command", &run, py::arg("command"), py::arg("config"),
        "Runs a command on a JSON config string; returns (report_json, files, ok, wall_seconds).");
  m.def("echo", [](const std::string& config) { return config_from(config).echo.dump(); }, py::arg("config"));

  m.def(
      "homology_class",
      [](const std::string& config) {
        const auto cfg = config_from(config);
        py::gil_scoped_release nogil;
        const auto h = homology_class(resolve_immersion(cfg), cfg.solenoid, resolve_measure(cfg), cfg.quad);
        return std::make_pair(h.value, h.quad_error);
      },
      py::arg("config"));
  m.def(
      "pair_current",
      [](const std::string& config, const std::string& form) {
        const auto cfg = config_from(config);
        const auto imm = resolve_immersion(cfg);
        const auto w = form_from(form, imm.n);
        py::gil_scoped_release nogil;
        const auto p = pair_current(imm, cfg.solenoid, resolve_measure(cfg), w, cfg.quad);
        return std::make_pair(p.value, p.quad_error_estimate);
      },
      py::arg("config"), py::arg("form"));
  m.def(
      "asymptotic_cycle",
      [](const std::string& config, double horizon) {
        const auto cfg = config_from(config);
        py::gil_scoped_release nogil;
        return asymptotic_cycle(resolve_immersion(cfg), cfg.solenoid, *cfg.x0, horizon);
      },
      py::arg("config"), py::arg("horizon"));

  m.def("exterior_d", [](const std::string& form, int n) { return to_json(d(form_from(form, n))).dump(); },
        py::arg("form"), py::arg("n"));
  m.def("wedge",
        [](const std::string& a, const std::string& b, int n) {
          return to_json(wedge(form_from(a, n), form_from(b, n))).dump();
        },
        py::arg("a"), py::arg("b"), py::arg("n"));
  m.def("integrate_torus", [](const std::string& form, int n) { return integrate_torus(form_from(form, n)); },
        py::arg("form"), py::arg("n"));

  m.def(
      "acceptance",
      [](const std::vector<int>& ids) {
        std::vector<CriterionResult> res;
        {
          py::gil_scoped_release nogil;
          res = run_acceptance(ids);
        }
        py::list out;
        for (const auto& r : res) {
          py::dict d;
          d["id"] = r.id;
          d["name"] = r.name;
          d["pass"] = r.pass;
          d["detail"] = r.detail;
          d["seconds"] = r.seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("ids") = std::vector<int>{});
}
