// Python extension exposing the simulator's main operations: resolve presets,
// run scenarios, collect per-cycle samples, and render comparison artifacts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irqsim/presets.hpp"
#include "irqsim/report.hpp"
#include "irqsim/runner.hpp"
#include "irqsim/scenario.hpp"
#include "irqsim/stats.hpp"

namespace py = pybind11;
using namespace irqsim;

namespace {

// Configuration mistakes surface as ValueError; anything else that the
// library throws is a genuine runtime failure.
bool is_usage_error(Errc c) {
  switch (c) {
    case Errc::parse_error:
    case Errc::unknown_key:
    case Errc::bad_unit:
    case Errc::bad_value:
    case Errc::bad_distribution:
    case Errc::config_error:
      return true;
    default:
      return false;
  }
}

Scenario scenario_from(const std::string& text, std::optional<std::uint64_t> seed) {
  Scenario sc = parse_scenario(text);
  if (seed) sc.measure.seed = *seed;
  return sc;
}

py::list sample_rows(const std::vector<LatencySample>& samples) {
  py::list rows;
  for (const LatencySample& s : samples)
    rows.append(py::make_tuple(s.n, s.irq_latency.ns, s.cs_delay.ns, s.overrun));
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deterministic interrupt-dispatch and scheduling-latency simulator";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (is_usage_error(e.code()))
        PyErr_SetString(PyExc_ValueError, e.what());
      else
        PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  m.def("preset_names", &preset_names, "Names of the built-in benchmark scenarios.");

  m.def(
      "preset_scenario",
      [](const std::string& name) { return render_scenario(preset(name)); },
      py::arg("name"), "Normalized scenario document (JSON text) for a preset.");

  m.def(
      "normalize_scenario",
      [](const std::string& text) { return render_scenario(parse_scenario(text)); },
      py::arg("scenario"),
      "Validates a scenario document and returns its normalized form.");

  m.def(
      "run",
      [](const std::string& text, std::optional<std::uint64_t> seed) {
        Scenario sc = scenario_from(text, seed);
        RawRun raw = run_measure(sc, nullptr);
        RunReport rep = build_report(sc, raw);
        return py::make_tuple(report_json(rep), sample_rows(raw.samples));
      },
      py::arg("scenario"), py::arg("seed") = py::none(),
      "Runs a scenario document. Returns (report_json, samples) where samples\n"
      "is one (n, irq_latency_ns, cs_delay_ns, overrun) tuple per cycle.");

  m.def(
      "run_to_dir",
      [](const std::string& text, const std::string& out_dir,
         std::optional<std::uint64_t> seed, bool write_samples) {
        RunOptions opt;
        opt.seed = seed;
        opt.write_samples = write_samples;
        RunResult res = run_to_dir(parse_scenario(text), out_dir, opt);
        return py::make_tuple(res.dir.string(), report_json(res.report));
      },
      py::arg("scenario"), py::arg("out_dir"), py::arg("seed") = py::none(),
      py::arg("write_samples") = false,
      "Runs a scenario and writes report.json, table.txt and histogram files\n"
      "into out_dir. Returns (out_dir, report_json).");

  m.def(
      "render_table",
      [](const std::vector<std::string>& report_jsons) {
        std::vector<RunReport> reports;
        reports.reserve(report_jsons.size());
        for (const std::string& j : report_jsons) reports.push_back(report_from_json(j));
        return render_table(reports);
      },
      py::arg("reports"),
      "Fixed-layout comparison table over any number of report documents.");

  m.def(
      "samples_csv",
      [](const py::list& rows) {
        std::vector<LatencySample> samples;
        samples.reserve(rows.size());
        for (const auto& row : rows) {
          auto t = row.cast<py::tuple>();
          LatencySample s;
          s.n = t[0].cast<std::uint64_t>();
          s.irq_latency = Duration{t[1].cast<std::uint64_t>()};
          s.cs_delay = Duration{t[2].cast<std::uint64_t>()};
          s.overrun = t[3].cast<bool>();
          samples.push_back(s);
        }
        return samples_csv(samples);
      },
      py::arg("samples"),
      "Renders sample tuples in the on-disk samples.csv format.");

  m.def(
      "parse_duration",
      [](const std::string& text) { return parse_duration(text).ns; }, py::arg("text"),
      "\"250us\" -> 250000 nanoseconds.");

  m.def(
      "format_duration",
      [](std::uint64_t ns) { return format_duration(Duration{ns}); }, py::arg("ns"),
      "Nanoseconds -> the shortest exact duration string.");
}
