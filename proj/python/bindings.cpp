#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "phi/corpus.hpp"
#include "phi/errors.hpp"
#include "phi/parser.hpp"
#include "phi/runtime.hpp"

namespace py = pybind11;

namespace {

py::object to_python(const phi::DataValue& v) {
  if (v.is_bool()) return py::bool_(v.as_bool());
  if (v.is_int()) return py::int_(v.as_int());
  if (v.is_float()) return py::float_(v.as_float());
  if (v.is_string()) return py::str(v.as_string());
  const auto& bytes = v.as_bytes();
  return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

py::dict result_dict(const phi::Execution& ex, std::string out, std::string err) {
  py::dict d;
  d["exit_code"] = ex.exit_code;
  d["stdout"] = py::bytes(out);
  d["stderr"] = std::move(err);
  d["value"] = ex.value ? to_python(*ex.value) : py::none();
  d["steps"] = ex.steps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_phi, m) {
  m.doc() = "Interpreter for the phi object language";

  py::register_exception<phi::ParseError>(m, "ParseError", PyExc_ValueError);

  m.def(
      "format",
      [](const std::string& source, const std::string& file) {
        return phi::print_program(phi::parse_program(source, file));
      },
      py::arg("source"), py::arg("file") = "<string>", "Parse a program and print it in canonical form.");

  m.def(
      "run",
      [](const std::string& source, const std::string& file, long long max_steps, std::int64_t heap_size, bool trace,
         bool traceability) {
        phi::RunConfig config;
        config.max_steps = max_steps;
        config.heap_size = heap_size;
        config.trace = trace;
        config.traceability = traceability;
        std::ostringstream out, err;
        phi::Execution ex;
        {
          py::gil_scoped_release release;
          ex = phi::execute(source, file, config, out, err);
        }
        return result_dict(ex, out.str(), err.str());
      },
      py::arg("source"), py::arg("file") = "<string>", py::arg("max_steps") = phi::RunConfig{}.max_steps,
      py::arg("heap_size") = phi::RunConfig{}.heap_size, py::arg("trace") = false, py::arg("traceability") = false,
      "Run a program. Returns exit_code, stdout (bytes), stderr, value and steps.");

  m.def("default_corpus_dir", &phi::default_corpus_dir);

  m.def(
      "corpus_entries",
      [](const std::filesystem::path& dir) {
        py::list out;
        for (const auto& e : phi::list_entries(dir)) {
          py::dict d;
          d["id"] = e.id;
          d["section"] = e.section;
          d["program"] = e.program;
          d["expected_stdout"] = py::bytes(e.expected_stdout);
          out.append(d);
        }
        return out;
      },
      py::arg("dir") = phi::default_corpus_dir());

  m.def(
      "run_corpus",
      [](const std::string& glob, const std::filesystem::path& dir) {
        py::list out;
        for (const auto& e : phi::filter_entries(phi::list_entries(dir), glob)) {
          phi::EntryVerdict v = phi::check_entry(e, phi::run_entry(e));
          out.append(py::make_tuple(v.id, v.passed, v.reason));
        }
        return out;
      },
      py::arg("glob") = "*", py::arg("dir") = phi::default_corpus_dir(),
      "Run matching corpus entries; returns (id, passed, reason) tuples.");
}
